#include "fogpss/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fogpss {

PssGains::PssGains(Eigen::VectorXd gains, Eigen::VectorXd rates, double eps,
                   Eigen::VectorXd input_bounds)
    : b(std::move(gains)), rho(std::move(rates)), epsilon(eps), u_max(std::move(input_bounds)) {
  if (b.size() == 0 || rho.size() != b.size() || u_max.size() != b.size()) {
    throw std::invalid_argument("PSS gains: b, rho and u_max need one entry per joint");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("PSS gains: epsilon must be > 0");
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (!(rho[i] > 0.0) || !(u_max[i] > 0.0)) {
      throw std::invalid_argument("PSS gains: rho and u_max must be > 0");
    }
    const double threshold = u_max[i] / (rho[i] * epsilon);
    if (!(b[i] > threshold)) {
      std::ostringstream os;
      os << "PSS gains: joint " << i + 1 << " needs b > u_max/(rho epsilon) = " << threshold
         << ", got b = " << b[i];
      throw std::invalid_argument(os.str());
    }
  }
}

Eigen::VectorXd PssGains::eta() const {
  return (rho.array() * epsilon - u_max.array() / b.array()).matrix();
}

double pss_bound_radius(double rho, double epsilon, double c1, double c2) {
  return (rho * c2 + c1) / rho + epsilon;
}

double pss_derivative_bound(double rho, double epsilon, double c1, double c2) {
  return 2.0 * rho * (c2 + c1 / rho + epsilon);
}

FogpssConfig::FogpssConfig(double d, double beta, double eps0, double a, double umax)
    : delta(d), beta_bar(beta), epsilon0(eps0), alpha(a), u_max(umax) {
  if (!(delta > 0.0) || !(epsilon0 > 0.0) || !(u_max > 0.0)) {
    throw std::invalid_argument("FOGPSS: delta, epsilon0 and u_max must be > 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("FOGPSS: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double threshold = fogpss_min_gain(u_max, delta, epsilon0);
  if (!(beta_bar > threshold)) {
    std::ostringstream os;
    os << "FOGPSS gain condition beta_bar > u_max/(delta*epsilon0) = " << threshold
       << " violated: beta_bar = " << beta_bar;
    throw std::invalid_argument(os.str());
  }
}

double FogpssConfig::beta_hat() const { return (beta_bar * delta * epsilon0 - u_max) / beta_bar; }

double fogpss_min_gain(double u_max, double delta, double epsilon0) {
  if (!(u_max >= 0.0) || !(delta > 0.0) || !(epsilon0 > 0.0)) {
    throw std::invalid_argument("fogpss_min_gain: u_max >= 0, delta > 0, epsilon0 > 0 required");
  }
  return u_max / (delta * epsilon0);
}

double fogpss_bound_radius(const FogpssConfig& cfg, double c1, double c2) {
  return (cfg.delta * c2 + c1) / cfg.delta + cfg.epsilon0;
}

double fogpss_control(const Eigen::Ref<const Eigen::VectorXd>& history, double h,
                      const FogpssConfig& cfg) {
  if (history.size() == 0) throw std::invalid_argument("fogpss_control: empty history");
  const double d_alpha = caputo_l1_last(history, h, FracOrder(cfg.alpha));
  return cfg.beta_bar * (d_alpha + cfg.delta * history[history.size() - 1]);
}

double fogpss_control(const SampledSignal<double>& history_xe_tilde, const FogpssConfig& cfg) {
  return fogpss_control(history_xe_tilde.values(), history_xe_tilde.step(), cfg);
}

Eigen::VectorXd pss_control(const std::vector<SampledSignal<double>>& history_e_tilde,
                            const PssGains& gains) {
  if (static_cast<Eigen::Index>(history_e_tilde.size()) != gains.joints()) {
    throw std::invalid_argument("pss_control: one history per joint required");
  }
  Eigen::VectorXd u(gains.joints());
  for (Eigen::Index i = 0; i < gains.joints(); ++i) {
    const auto& e = history_e_tilde[static_cast<std::size_t>(i)];
    if (e.size() < 2) throw std::invalid_argument("pss_control: need >= 2 samples per joint");
    const Index n = e.size() - 1;
    const double rate = (e[n] - e[n - 1]) / e.step();
    u[i] = -gains.b[i] * (rate + gains.rho[i] * e[n]);
  }
  return u;
}

AdaptationLaw parse_adaptation_law(const std::string& name) {
  if (name == "excess_times_norm" || name == "default") return AdaptationLaw::excess_times_norm;
  if (name == "squared_norm") return AdaptationLaw::squared_norm;
  throw std::invalid_argument("unknown adaptation law '" + name + "'");
}

std::string to_string(AdaptationLaw law) {
  switch (law) {
    case AdaptationLaw::excess_times_norm: return "excess_times_norm";
    case AdaptationLaw::squared_norm: return "squared_norm";
  }
  return "?";
}

double adaptation_rate(AdaptationLaw law, double e_norm, double lambda) {
  switch (law) {
    case AdaptationLaw::excess_times_norm: return (e_norm - lambda) * e_norm;
    case AdaptationLaw::squared_norm: return e_norm * e_norm;
  }
  return 0.0;
}

LambdaTrackerState::LambdaTrackerState(double k0, double lam, double a, AdaptationLaw f)
    : k(k0), lambda(lam), alpha(a), law(f), episode_k0(k0) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda tracker: lambda must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("lambda tracker: alpha must lie in (0, 1]");
  }
  if (!std::isfinite(k0)) throw std::invalid_argument("lambda tracker: non-finite initial gain");
}

LambdaTrackerOutput lambda_tracker_step(LambdaTrackerState state, const Eigen::VectorXd& e, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("lambda_tracker_step: h must be > 0");
  const double norm = e.norm();
  if (norm < state.lambda) {
    state.episode_k0 = state.k;
    state.episode_rates.clear();
  } else {
    state.episode_rates.push_back(adaptation_rate(state.law, norm, state.lambda));
    // Rectangle (ABM predictor) weights for D^alpha k = f from the episode start.
    const auto m = static_cast<Index>(state.episode_rates.size());
    double acc = 0.0;
    for (Index j = 0; j < m; ++j) {
      acc += state.episode_rates[static_cast<std::size_t>(j)] * rl_cell_weight(m - j, state.alpha);
    }
    const double candidate = state.episode_k0 + std::pow(h, state.alpha) / gamma(state.alpha + 1.0) * acc;
    // Fractional memory fades for alpha < 1; the gain never gives ground back.
    state.k = std::max(state.k, candidate);
    if (!std::isfinite(state.k)) throw std::runtime_error("lambda_tracker_step: gain blew up");
  }
  Eigen::VectorXd u = -state.k * e;
  return {std::move(state), std::move(u)};
}

double saturate(double value, double epsilon, SaturationKind kind) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("saturate: epsilon must be > 0");
  switch (kind) {
    case SaturationKind::tanh: return epsilon * std::tanh(value);
    case SaturationKind::atan: return 2.0 * epsilon / std::numbers::pi * std::atan(value);
    case SaturationKind::clip: return std::clamp(value, -epsilon, epsilon);
  }
  return 0.0;
}

}  // namespace fogpss
