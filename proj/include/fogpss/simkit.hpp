#pragma once

// Fixed-step closed-loop simulation of an integer-order plant driven by a
// controller with fractional memory, observed through the measurement
// channel x~_e = x_e - I^alpha omega.
//
// Each step: evaluate the reference, form x_e = x_d - x, evaluate omega and
// I^alpha omega, form x~_e, compute u, advance the plant by RK4 with u held.
// Two couplings of control and plant are available:
//   implicit  u held over [t_n, t_n+1] is the controller output at t_n+1,
//             solved jointly with x_n+1 (the default; stable at h = 0.01 for
//             the high-gain FOGPSS loop)
//   explicit  u held over [t_n, t_n+1] is the output at t_n (zero-order hold
//             of the sampled law)
// Row n of a trace always holds the controller output at t_n.

#include "fogpss/controllers.hpp"
#include "fogpss/plants.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fogpss {

enum class Coupling { implicit, explicit_hold };

/// u = 0 throughout.
struct OpenLoop {};

struct LambdaTrackerSpec {
  double k0 = 0.0;
  double lambda = 0.1;
  double alpha = 0.5;
  AdaptationLaw law = AdaptationLaw::excess_times_norm;
};

using ControllerSpec = std::variant<FogpssConfig, LambdaTrackerSpec, OpenLoop>;

struct SimConfig {
  double h;
  double T;
  FirstOrderPlant plant;
  ReferenceSpec reference;
  MeasurementModel measurement;
  ControllerSpec controller;
  double x0;
  std::uint64_t seed = 0;
  Coupling coupling = Coupling::implicit;
  bool negate_u = false;

  void validate() const;
  /// Number of steps N; the grid has N + 1 rows.
  Index steps() const;
};

struct SimTrace {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> x_d;
  std::vector<double> x_e;
  std::vector<double> xe_tilde;
  std::vector<double> u;
  /// Adaptive gain k after each row; filled for the lambda-tracker only.
  std::vector<double> gain;

  std::string config_hash;
  std::optional<double> bound_radius;
  /// Entry into bound_radius, when one is set.
  std::optional<double> entry_time;

  std::size_t rows() const { return t.size(); }
};

SimTrace simulate(const SimConfig& config);

/// Runs independent configurations concurrently.
std::vector<SimTrace> simulate_batch(const std::vector<SimConfig>& configs);

/// Earliest grid time after which |x_e| <= radius for the rest of the trace.
std::optional<double> entry_time(const SimTrace& trace, double radius);
std::optional<double> entry_time(const std::vector<double>& t, const std::vector<double>& values,
                                 double radius);

/// Stable text rendering of a configuration and its FNV-1a hash.
std::string canonical_description(const SimConfig& config);
std::string config_hash(const std::string& canonical);

/// Checks the fractional Lyapunov descent along a trace: wherever
/// |x_e| > radius, the L1 estimate of D^alpha(x_e^2 / 2) must not exceed the
/// discretization tolerance.
struct DescentReport {
  std::size_t rows_checked = 0;
  double max_excess = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};
DescentReport descent_proxy(const SimTrace& trace, double alpha, double radius);

// Decoupled robot under the integer-order PSS law.

struct RobotExperimentConfig {
  double h;
  double T;
  RobotPlant plant;
  std::vector<ReferenceSpec> reference;
  std::vector<CatalogFunction> omega;
  Eigen::VectorXd c1;
  Eigen::VectorXd c2;
  PssGains gains;
  Eigen::VectorXd q0;
  Eigen::VectorXd qdot0;
  /// Joint torque is tau = -u when set. With e = q_d - q the law
  /// u = -b s is anti-dissipative on M qddot = tau - d, so the default
  /// applies the opposite actuator convention.
  bool negate_u = true;

  void validate() const;
  Index steps() const;
};

struct RobotJointReport {
  double radius = 0.0;
  std::optional<double> entry_time;
  double derivative_bound = 0.0;
  /// max |de/dt| (backward difference) over rows after entry.
  double max_derivative_inside = 0.0;
  bool derivative_ok = false;
};

struct RobotExperimentResult {
  std::vector<SimTrace> joints;
  std::vector<RobotJointReport> reports;
};

/// Relative slack granted to the inside-ball derivative check.
inline constexpr double kDerivativeSlack = 0.10;

RobotExperimentResult pss_robot_experiment(const RobotExperimentConfig& config);

}  // namespace fogpss
