#pragma once

// Control laws:
//   PSS        u_i = -b_i (de~_i/dt + rho_i e~_i)
//   FOGPSS     u   = beta_bar (D^alpha x~_e + delta x~_e)
//   lambda     u   = -k e,  D^alpha k = f(e, lambda) while |e| >= lambda
// plus the gain and bound calculators the designs need and saturation
// helpers.

#include "fogpss/fraccalc.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace fogpss {

/// Gains of the integer-order PSS law. Construction enforces
/// b_i > u_i_max / (rho_i epsilon) for every joint.
struct PssGains {
  Eigen::VectorXd b;
  Eigen::VectorXd rho;
  double epsilon;
  Eigen::VectorXd u_max;

  PssGains(Eigen::VectorXd gains, Eigen::VectorXd rates, double eps, Eigen::VectorXd input_bounds);

  Eigen::Index joints() const { return b.size(); }
  /// eta_i = rho_i epsilon - u_i_max / b_i, the guaranteed decay rate.
  Eigen::VectorXd eta() const;
};

/// Radius (rho c2 + c1)/rho + epsilon of the PSS error ball.
double pss_bound_radius(double rho, double epsilon, double c1, double c2);
/// 2 rho (c2 + c1/rho + epsilon), the bound on |de/dt| inside the ball.
double pss_derivative_bound(double rho, double epsilon, double c1, double c2);

/// FOGPSS design. Construction enforces beta_bar > u_max / (delta epsilon0).
struct FogpssConfig {
  double delta;
  double beta_bar;
  double epsilon0;
  double alpha;
  double u_max;

  FogpssConfig(double delta, double beta_bar, double epsilon0, double alpha, double u_max);

  /// (beta_bar delta epsilon0 - u_max) / beta_bar.
  double beta_hat() const;
};

/// u_max / (delta epsilon0); beta_bar must exceed it strictly.
double fogpss_min_gain(double u_max, double delta, double epsilon0);

/// (delta c2 + c1)/delta + epsilon0, the radius the tracking error is driven into.
double fogpss_bound_radius(const FogpssConfig& cfg, double c1, double c2);

/// u(t_n) = beta_bar (D^alpha x~_e(t_n) + delta x~_e(t_n)) from the measured
/// error history, L1 Caputo over the full record.
double fogpss_control(const SampledSignal<double>& history_xe_tilde, const FogpssConfig& cfg);

/// Same law written for a history held in a plain vector.
double fogpss_control(const Eigen::Ref<const Eigen::VectorXd>& history, double h,
                      const FogpssConfig& cfg);

/// Per-joint PSS output from per-joint measured error histories.
Eigen::VectorXd pss_control(const std::vector<SampledSignal<double>>& history_e_tilde,
                            const PssGains& gains);

/// Adaptation law f(e, lambda) of the lambda-tracker.
enum class AdaptationLaw {
  /// (|e| - lambda) |e|
  excess_times_norm,
  /// |e|^2
  squared_norm,
};

AdaptationLaw parse_adaptation_law(const std::string& name);
std::string to_string(AdaptationLaw law);
double adaptation_rate(AdaptationLaw law, double e_norm, double lambda);

/// Gain state of the fractional lambda-tracker. Each episode with |e| >= lambda
/// integrates D^alpha k = f from the gain held at its start; k is held while
/// |e| < lambda and never decreases.
struct LambdaTrackerState {
  double k;
  double lambda;
  double alpha;
  AdaptationLaw law = AdaptationLaw::excess_times_norm;

  /// Gain at the start of the current episode and the rates seen since.
  double episode_k0;
  std::vector<double> episode_rates;

  LambdaTrackerState(double k0, double lambda, double alpha,
                     AdaptationLaw law = AdaptationLaw::excess_times_norm);
};

struct LambdaTrackerOutput {
  LambdaTrackerState state;
  Eigen::VectorXd u;
};

/// One step: updates k from the current error, returns u = -k e.
/// alpha = 1 reduces to an explicit Euler step of kdot = f.
LambdaTrackerOutput lambda_tracker_step(LambdaTrackerState state, const Eigen::VectorXd& e, double h);

enum class SaturationKind { tanh, atan, clip };

/// epsilon tanh(z), (2 epsilon / pi) atan(z) or clip(z, -epsilon, epsilon).
double saturate(double value, double epsilon, SaturationKind kind);

}  // namespace fogpss
