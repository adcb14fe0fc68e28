#include "fogpss/fde_abm.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fogpss {

void FdeProblem::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("fde: alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
  const auto needed = static_cast<std::size_t>(std::ceil(alpha));
  if (x0.size() != needed) {
    throw std::invalid_argument("fde: expected " + std::to_string(needed) +
                                " initial values for alpha = " + std::to_string(alpha) + ", got " +
                                std::to_string(x0.size()));
  }
  for (const auto& v : x0) {
    if (v.size() != x0.front().size() || v.size() == 0) {
      throw std::invalid_argument("fde: initial values must share a non-zero dimension");
    }
    if (!v.allFinite()) throw std::invalid_argument("fde: non-finite initial value");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("fde: horizon must be finite and > 0");
  }
  if (steps < 1) throw std::invalid_argument("fde: need at least one step");
  if (!rhs) throw std::invalid_argument("fde: missing right-hand side");
}

SampledSignal<double> FdeSolution::component(Index i) const {
  Vector<double> v(static_cast<Index>(states.size()));
  for (std::size_t n = 0; n < states.size(); ++n) v[static_cast<Index>(n)] = states[n][i];
  return SampledSignal<double>(t0, h, std::move(v));
}

double abm_coeff_a(Index j, Index n, double alpha) {
  if (n < 0 || j < 0 || j > n + 1) {
    throw std::out_of_range("abm_coeff_a: need 0 <= j <= n+1, got j=" + std::to_string(j) +
                            " n=" + std::to_string(n));
  }
  const double a1 = alpha + 1.0;
  if (j == n + 1) return 1.0;
  const auto nd = static_cast<double>(n);
  if (j == 0) return std::pow(nd, a1) - (nd - alpha) * std::pow(nd + 1.0, alpha);
  const auto m = static_cast<double>(n - j);
  return std::pow(m + 2.0, a1) + std::pow(m, a1) - 2.0 * std::pow(m + 1.0, a1);
}

double abm_coeff_b(Index j, Index n, double alpha, double h) {
  if (n < 0 || j < 0 || j > n) {
    throw std::out_of_range("abm_coeff_b: need 0 <= j <= n, got j=" + std::to_string(j) +
                            " n=" + std::to_string(n));
  }
  if (!(h > 0.0)) throw std::invalid_argument("abm_coeff_b: h must be > 0");
  const auto m = static_cast<double>(n - j);
  return std::pow(h, alpha) / alpha * (std::pow(m + 1.0, alpha) - std::pow(m, alpha));
}

namespace {

State taylor_part(const std::vector<State>& x0, double t) {
  State s = x0.front();
  double factor = 1.0;
  for (std::size_t k = 1; k < x0.size(); ++k) {
    factor *= t / static_cast<double>(k);
    s += factor * x0[k];
  }
  return s;
}

}  // namespace

FdeSolution abm_solve(const FdeProblem& problem) {
  problem.validate();
  const double alpha = problem.alpha;
  const Index N = problem.steps;
  const double h = problem.step();
  const double a1 = alpha + 1.0;

  // Power tables: pw[m] = m^alpha, pw1[m] = m^(alpha+1).
  Vector<double> pw(N + 2), pw1(N + 2);
  for (Index m = 0; m <= N + 1; ++m) {
    pw[m] = std::pow(static_cast<double>(m), alpha);
    pw1[m] = std::pow(static_cast<double>(m), a1);
  }
  const double pred_scale = std::pow(h, alpha) / (alpha * gamma(alpha));
  const double corr_scale = std::pow(h, alpha) / gamma(alpha + 2.0);

  FdeSolution sol;
  sol.t0 = 0.0;
  sol.h = h;
  sol.states.reserve(static_cast<std::size_t>(N + 1));
  sol.predictor_states.reserve(static_cast<std::size_t>(N + 1));
  std::vector<State> f_hist;
  f_hist.reserve(static_cast<std::size_t>(N + 1));

  sol.states.push_back(problem.x0.front());
  sol.predictor_states.push_back(problem.x0.front());
  f_hist.push_back(problem.rhs(0.0, problem.x0.front()));

  const Index dim = problem.dimension();
  State pred_sum(dim), corr_sum(dim);
  for (Index n = 0; n < N; ++n) {
    const double t_next = static_cast<double>(n + 1) * h;
    pred_sum.setZero();
    corr_sum.setZero();
    for (Index j = 0; j <= n; ++j) {
      const auto& fj = f_hist[static_cast<std::size_t>(j)];
      const Index m = n - j;
      pred_sum += (pw[m + 1] - pw[m]) * fj;
      double a;
      if (j == 0) {
        a = pw1[n] - (static_cast<double>(n) - alpha) * pw[n + 1];
      } else {
        a = pw1[m + 2] + pw1[m] - 2.0 * pw1[m + 1];
      }
      corr_sum += a * fj;
    }
    const State base = taylor_part(problem.x0, t_next);
    State predictor = base + pred_scale * pred_sum;
    State corrected = base + corr_scale * (problem.rhs(t_next, predictor) + corr_sum);
    if (!corrected.allFinite()) {
      throw BlowUpError("abm_solve: non-finite state at step " + std::to_string(n + 1), n + 1);
    }
    f_hist.push_back(problem.rhs(t_next, corrected));
    sol.predictor_states.push_back(std::move(predictor));
    sol.states.push_back(std::move(corrected));
  }
  return sol;
}

double max_grid_error(const FdeSolution& sol, const std::function<double(double)>& reference) {
  double err = 0.0;
  for (std::size_t n = 0; n < sol.states.size(); ++n) {
    err = std::max(err, std::abs(reference(sol.time(static_cast<Index>(n))) - sol.states[n][0]));
  }
  return err;
}

ConvergenceEstimate estimate_convergence_order(const FdeProblem& problem,
                                               const std::function<double(double)>& reference,
                                               const std::vector<Index>& step_counts) {
  if (step_counts.size() < 3) {
    throw std::invalid_argument("estimate_convergence_order: need >= 3 refinement levels");
  }
  for (std::size_t i = 1; i < step_counts.size(); ++i) {
    if (step_counts[i] <= step_counts[i - 1]) {
      throw std::invalid_argument("estimate_convergence_order: step counts must increase");
    }
  }
  ConvergenceEstimate est;
  for (Index N : step_counts) {
    FdeProblem p = problem;
    p.steps = N;
    const FdeSolution sol = abm_solve(p);
    est.steps.push_back(sol.h);
    est.max_errors.push_back(max_grid_error(sol, reference));
  }
  for (double e : est.max_errors) {
    if (e == 0.0) {
      est.degenerate = true;
      est.order = std::numeric_limits<double>::infinity();
      return est;
    }
  }
  const auto k = static_cast<double>(est.steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < est.steps.size(); ++i) {
    const double x = std::log(est.steps[i]);
    const double y = std::log(est.max_errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  est.order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return est;
}

}  // namespace fogpss
