#pragma once

// Adams-Bashforth-Moulton predictor-corrector for Caputo initial-value
// problems D^alpha x = f(t, x), alpha in (0, 2), on a uniform grid.
//
// Corrector weights follow the standard fractional Adams scheme:
//   a_{0,n+1} = n^(a+1) - (n-a)(n+1)^a
//   a_{j,n+1} = (n-j+2)^(a+1) + (n-j)^(a+1) - 2(n-j+1)^(a+1),  1 <= j <= n
//   a_{n+1,n+1} = 1
// and predictor weights b_{j,n+1} = h^a/a ((n-j+1)^a - (n-j)^a). One
// corrector pass per step (PECE). Global error O(h^min(2, 1+a)) for smooth
// solutions.

#include "fogpss/fraccalc.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fogpss {

using State = Vector<double>;
using RhsFunction = std::function<State(double t, const State& x)>;

struct FdeProblem {
  double alpha = 0.5;
  RhsFunction rhs;
  /// x^(k)(0) for k = 0 .. ceil(alpha) - 1.
  std::vector<State> x0;
  double horizon = 1.0;
  Index steps = 100;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  Index dimension() const { return x0.empty() ? 0 : x0.front().size(); }
  double step() const { return horizon / static_cast<double>(steps); }
};

struct FdeSolution {
  double t0 = 0.0;
  double h = 0.0;
  /// states[n] = x_h(t_n), n = 0..N.
  std::vector<State> states;
  /// predictor_states[n] = x_h^p(t_n); entry 0 repeats the initial state.
  std::vector<State> predictor_states;

  double time(Index n) const { return t0 + static_cast<double>(n) * h; }
  /// Component `i` of every state as a sampled signal.
  SampledSignal<double> component(Index i = 0) const;
};

/// Raised when a state becomes non-finite.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, Index step) : std::runtime_error(what), step_(step) {}
  Index step() const { return step_; }

 private:
  Index step_;
};

/// Corrector weight a_{j,n+1} without the h^alpha/Gamma(alpha+2) factor.
double abm_coeff_a(Index j, Index n, double alpha);
/// Predictor weight b_{j,n+1} including h^alpha/alpha.
double abm_coeff_b(Index j, Index n, double alpha, double h);

FdeSolution abm_solve(const FdeProblem& problem);

struct ConvergenceEstimate {
  /// Least-squares slope of log(max error) against log(h).
  double order = 0.0;
  /// Set when some refinement level reproduced the reference exactly; order
  /// is then +infinity.
  bool degenerate = false;
  std::vector<double> steps;
  std::vector<double> max_errors;
};

/// Measures the empirical order of abm_solve on `problem` against an exact
/// solution, re-solving with each N in `step_counts` (component 0).
ConvergenceEstimate estimate_convergence_order(const FdeProblem& problem,
                                               const std::function<double(double)>& reference,
                                               const std::vector<Index>& step_counts);

/// Max over the grid of |reference(t_n) - x_h(t_n)| for component 0.
double max_grid_error(const FdeSolution& sol, const std::function<double(double)>& reference);

}  // namespace fogpss
