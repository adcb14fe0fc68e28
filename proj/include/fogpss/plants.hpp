#pragma once

// Plant and environment models: the first-order uncertain plant
//   xdot = -a_p x + b_p u + d(x, t),
// a decoupled n-joint robot M qddot + d = tau, bounded references and the
// measurement-error channel.

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fogpss {

/// A bounded modelling assumption failed along a simulated trajectory.
class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(int assumption, std::string quantity, double t, double value, double bound);

  int assumption() const { return assumption_; }
  double time() const { return t_; }
  double value() const { return value_; }

 private:
  int assumption_;
  double t_;
  double value_;
};

/// Named function f(x, t) from a fixed catalog, so that experiment configs
/// stay reproducible:
///   zero                     0
///   constant c               c
///   sin_product A w          A sin(w x t)
///   cos_product A w          A cos(w x t)
///   sin_time A w             A sin(w t)
///   cos_time A w             A cos(w t)
class CatalogFunction {
 public:
  enum class Kind { zero, constant, sin_product, cos_product, sin_time, cos_time };

  CatalogFunction() = default;
  CatalogFunction(Kind kind, double amplitude, double frequency = 0.0);

  /// Throws std::invalid_argument on unknown names or wrong parameter counts.
  static CatalogFunction parse(std::string_view name, std::span<const double> params);

  double operator()(double x, double t) const;
  /// d/dt for the time-only kinds; throws for state-dependent kinds.
  double time_derivative(double t) const;
  /// sup |f|.
  double bound() const;
  bool depends_on_state() const { return kind_ == Kind::sin_product || kind_ == Kind::cos_product; }

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  /// Catalog spelling, e.g. "sin_product 0.5 1".
  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  double amplitude_ = 0.0;
  double frequency_ = 0.0;
};

struct PlantBounds {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double b_lo = 0.0;
  double b_hi = 0.0;
  double d_bar = 0.0;
};

class FirstOrderPlant {
 public:
  /// Rejects parameters outside the declared bounds.
  FirstOrderPlant(double a_p, double b_p, CatalogFunction disturbance, PlantBounds bounds);

  double a_p() const { return a_p_; }
  double b_p() const { return b_p_; }
  const CatalogFunction& disturbance() const { return disturbance_; }
  const PlantBounds& bounds() const { return bounds_; }

  /// d(x, t), asserting |d| <= d_bar.
  double disturbance_at(double x, double t) const;
  /// Right-hand side -a_p x + b_p u + d(x, t).
  double rate(double x, double u, double t) const;

 private:
  double a_p_;
  double b_p_;
  CatalogFunction disturbance_;
  PlantBounds bounds_;
};

/// One classical RK4 step with u held constant over [t, t+h].
double plant_step_rk4(const FirstOrderPlant& plant, double x, double u, double t, double h);

/// Bounded reference: |x_d| <= b1, |xdot_d| <= b2.
struct ReferenceSpec {
  CatalogFunction x_d;
  double b1 = 0.0;
  double b2 = 0.0;

  ReferenceSpec() = default;
  /// x_d must be a time-only catalog entry.
  ReferenceSpec(CatalogFunction shape, double pos_bound, double vel_bound);
};

struct ReferenceSample {
  double x_d;
  double xdot_d;
};

/// Position and analytic velocity at t; throws AssumptionViolation(1) on a
/// bound breach.
ReferenceSample reference_eval(const ReferenceSpec& ref, double t);

/// Self-support input bound (b2 + a_hi |x|_max + d_bar) / b_lo.
double estimate_u_max(const PlantBounds& bounds, const ReferenceSpec& reference, double x_abs_bound);

/// Measured error x~_e = x_e - I^alpha omega with |omega| <= c1 and
/// |I^alpha omega| <= c2. omega is evaluated as omega(x_e, t).
struct MeasurementModel {
  CatalogFunction omega;
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha = 0.5;

  MeasurementModel() = default;
  MeasurementModel(CatalogFunction w, double bound1, double bound2, double order);
};

/// Decoupled robot M qddot + d(q, t) = tau with constant SPD inertia.
class RobotPlant {
 public:
  RobotPlant(Eigen::MatrixXd inertia, std::vector<CatalogFunction> disturbance,
             Eigen::VectorXd d_bar);

  Eigen::Index joints() const { return inertia_.rows(); }
  const Eigen::MatrixXd& inertia() const { return inertia_; }
  const Eigen::VectorXd& d_bar() const { return d_bar_; }
  const std::vector<CatalogFunction>& disturbance() const { return disturbance_; }

  /// d_i(q_i, t), asserting the per-joint bound.
  Eigen::VectorXd disturbance_at(const Eigen::VectorXd& q, double t) const;

  /// RK4 step of (q, qdot) with tau held.
  void step_rk4(Eigen::VectorXd& q, Eigen::VectorXd& qdot, const Eigen::VectorXd& tau, double t,
                double h) const;

 private:
  Eigen::MatrixXd inertia_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  std::vector<CatalogFunction> disturbance_;
  Eigen::VectorXd d_bar_;
};

}  // namespace fogpss
