#include "fogpss/fde_abm.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using fogpss::FdeProblem;
using fogpss::Index;
using fogpss::State;

namespace {

FdeProblem linear(double alpha, double lambda, double x0, double T, Index N) {
  FdeProblem p;
  p.alpha = alpha;
  p.rhs = [lambda](double, const State& x) { return State(lambda * x); };
  p.x0 = {State::Constant(1, x0)};
  p.horizon = T;
  p.steps = N;
  return p;
}

// Extended-precision series for E_a(z).
double ml_oracle(long double a, long double z) {
  long double sum = 0.0L, zk = 1.0L;
  for (int k = 0; k < 200; ++k) {
    sum += zk / std::tgammal(a * k + 1.0L);
    zk *= z;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("corrector weights") {
  CHECK(fogpss::abm_coeff_a(4, 3, 0.7) == 1.0);
  CHECK(fogpss::abm_coeff_a(1, 1, 1.0) == doctest::Approx(2.0));
  CHECK(fogpss::abm_coeff_a(0, 0, 0.5) == doctest::Approx(0.5));
  // j = 0 branch against direct arithmetic at n = 3.
  const double a = 0.4;
  CHECK(fogpss::abm_coeff_a(0, 3, a) == doctest::Approx(std::pow(3.0, a + 1) - (3.0 - a) * std::pow(4.0, a)));
  CHECK_THROWS_AS(fogpss::abm_coeff_a(5, 3, a), std::out_of_range);
  CHECK_THROWS_AS(fogpss::abm_coeff_a(-1, 3, a), std::out_of_range);
}

TEST_CASE("predictor weights") {
  CHECK(fogpss::abm_coeff_b(3, 3, 1.0, 0.1) == doctest::Approx(0.1));
  CHECK(fogpss::abm_coeff_b(0, 0, 0.5, 1.0) == doctest::Approx(2.0));
  const long double oracle = 2.0L * (std::sqrt(2.0L) - 1.0L);
  CHECK(fogpss::abm_coeff_b(0, 1, 0.5, 1.0) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-14));
  CHECK_THROWS_AS(fogpss::abm_coeff_b(2, 1, 0.5, 1.0), std::out_of_range);
}

TEST_CASE("weights sum to the exact integral of a constant") {
  // Predictor: sum_j b_{j,n+1} = h^a/a (n+1)^a. Corrector: (sum_j a_{j,n+1}) h^a/Gamma(a+2) = t^a/Gamma(a+1).
  const double a = 0.35, h = 0.1;
  const Index n = 9;
  double sb = 0.0, sa = 0.0;
  for (Index j = 0; j <= n; ++j) sb += fogpss::abm_coeff_b(j, n, a, h);
  for (Index j = 0; j <= n + 1; ++j) sa += fogpss::abm_coeff_a(j, n, a);
  CHECK(sb == doctest::Approx(std::pow(h, a) / a * std::pow(n + 1.0, a)));
  CHECK(sa == doctest::Approx(std::pow(n + 1.0, a) * (a + 1.0)));
}

TEST_CASE("integer order reduces to the exponential") {
  const auto sol = fogpss::abm_solve(linear(1.0, -1.0, 1.0, 1.0, 1000));
  CHECK(std::abs(sol.states.back()[0] - std::exp(-1.0)) <= 2e-4);
}

TEST_CASE("zero right-hand side keeps the initial value") {
  const auto sol = fogpss::abm_solve(linear(0.5, 0.0, 3.0, 2.0, 200));
  for (const auto& x : sol.states) CHECK(x[0] == 3.0);
}

TEST_CASE("half order against the Mittag-Leffler oracle") {
  const auto sol = fogpss::abm_solve(linear(0.5, -1.0, 1.0, 1.0, 2000));
  const double oracle = ml_oracle(0.5L, -1.0L);
  CHECK(oracle == doctest::Approx(0.4275836).epsilon(1e-7));
  CHECK(std::abs(sol.states.back()[0] - oracle) <= 1e-3);
  CHECK(fogpss::max_grid_error(sol, [](double t) { return ml_oracle(0.5L, -std::sqrt(static_cast<long double>(t))); }) <=
        1e-3);
}

TEST_CASE("order above one uses both initial derivatives") {
  // D^1.5 x = 0 with x(0) = 1, x'(0) = 2 gives x = 1 + 2t.
  FdeProblem p;
  p.alpha = 1.5;
  p.rhs = [](double, const State& x) { return State(State::Zero(x.size())); };
  p.x0 = {State::Constant(1, 1.0), State::Constant(1, 2.0)};
  p.horizon = 1.0;
  p.steps = 50;
  const auto sol = fogpss::abm_solve(p);
  for (Index n = 0; n <= 50; ++n) CHECK(sol.states[static_cast<std::size_t>(n)][0] == doctest::Approx(1.0 + 2.0 * sol.time(n)));
}

TEST_CASE("problem validation") {
  auto p = linear(0.5, -1.0, 1.0, 1.0, 10);
  p.alpha = 2.0;
  CHECK_THROWS_AS(fogpss::abm_solve(p), std::invalid_argument);
  p = linear(1.5, -1.0, 1.0, 1.0, 10);
  CHECK_THROWS_AS(fogpss::abm_solve(p), std::invalid_argument);  // needs two initial derivatives
  p = linear(0.5, -1.0, 1.0, 0.0, 10);
  CHECK_THROWS_AS(fogpss::abm_solve(p), std::invalid_argument);
  p = linear(0.5, -1.0, 1.0, 1.0, 0);
  CHECK_THROWS_AS(fogpss::abm_solve(p), std::invalid_argument);
}

TEST_CASE("blow-up is reported with its step") {
  FdeProblem p;
  p.alpha = 1.0;
  p.rhs = [](double, const State& x) { return State(x.array().square().matrix() * 1e3); };
  p.x0 = {State::Constant(1, 1.0)};
  p.horizon = 5.0;
  p.steps = 100;
  CHECK_THROWS_AS(fogpss::abm_solve(p), fogpss::BlowUpError);
}

TEST_CASE("solutions are deterministic and on the stated grid") {
  const auto p = linear(0.6, -2.0, 1.5, 3.0, 300);
  const auto a = fogpss::abm_solve(p);
  const auto b = fogpss::abm_solve(p);
  REQUIRE(a.states.size() == 301);
  CHECK(a.states.front()[0] == 1.5);
  CHECK(a.h == 3.0 / 300.0);
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    CHECK(a.states[n][0] == b.states[n][0]);
    CHECK(a.time(static_cast<Index>(n)) == static_cast<double>(n) * a.h);
  }
}

TEST_CASE("integer order matches classical RK4 on a long horizon") {
  const auto sol = fogpss::abm_solve(linear(1.0, -1.0, 1.0, 5.0, 5000));
  double x = 1.0, worst = 0.0;
  const double h = 0.001;
  for (std::size_t n = 1; n < sol.states.size(); ++n) {
    const double k1 = -x, k2 = -(x + 0.5 * h * k1), k3 = -(x + 0.5 * h * k2), k4 = -(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    worst = std::max(worst, std::abs(sol.states[n][0] - x));
  }
  CHECK(worst <= 5e-3);
}

TEST_CASE("vector states") {
  FdeProblem p;
  p.alpha = 0.7;
  p.rhs = [](double, const State& x) {
    State d(2);
    d << -x[0], -2.0 * x[1];
    return d;
  };
  p.x0 = {(State(2) << 1.0, 0.5).finished()};
  p.horizon = 1.0;
  p.steps = 1000;
  const auto sol = fogpss::abm_solve(p);
  CHECK(sol.states.back()[0] == doctest::Approx(ml_oracle(0.7L, -1.0L)).epsilon(1e-3));
  CHECK(sol.states.back()[1] == doctest::Approx(0.5 * ml_oracle(0.7L, -2.0L)).epsilon(1e-3));
  CHECK(sol.component(1)[0] == 0.5);
}

TEST_CASE("Caputo of the solved trajectory approximates the right-hand side") {
  // D^a x = -x; the residual L1(x) + x shrinks under refinement.
  for (double alpha : {0.3, 0.5, 0.8}) {
    double prev = std::numeric_limits<double>::infinity();
    for (Index N : {200, 400, 800}) {
      const auto sol = fogpss::abm_solve(linear(alpha, -1.0, 1.0, 1.0, N));
      const auto x = sol.component(0);
      const auto d = fogpss::caputo_derivative(x, fogpss::FracOrder(alpha));
      // Skip the first tenth of the interval where the solution is non-smooth.
      double res = 0.0;
      for (Index k = N / 10; k <= N; ++k) res = std::max(res, std::abs(d[k] + x[k]));
      CHECK(res < prev);
      prev = res;
    }
  }
}

TEST_CASE("convergence order estimates") {
  const std::vector<Index> Ns{250, 500, 1000, 2000};
  SUBCASE("integer order") {
    const auto est = fogpss::estimate_convergence_order(linear(1.0, -1.0, 1.0, 1.0, 10),
                                                        [](double t) { return std::exp(-t); }, Ns);
    CHECK(est.order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(est.max_errors.size() == 4);
  }
  SUBCASE("smooth solution x = t^2 recovers 1 + alpha") {
    for (double alpha : {0.3, 0.5, 0.8}) {
      FdeProblem p;
      p.alpha = alpha;
      const double c = 2.0 / std::tgamma(3.0 - alpha);
      p.rhs = [alpha, c](double t, const State& x) {
        return State((c * std::pow(t, 2.0 - alpha) + t * t - x.array()).matrix());
      };
      p.x0 = {State::Zero(1)};
      const auto est = fogpss::estimate_convergence_order(p, [](double t) { return t * t; }, Ns);
      CHECK(std::abs(est.order - std::min(2.0, 1.0 + alpha)) <= 0.3);
    }
  }
  SUBCASE("exact reproduction is flagged") {
    const auto est = fogpss::estimate_convergence_order(linear(0.5, 0.0, 2.0, 1.0, 10),
                                                        [](double) { return 2.0; }, {10, 20, 40});
    CHECK(est.degenerate);
    CHECK(std::isinf(est.order));
  }
  SUBCASE("needs three increasing step counts") {
    auto ref = [](double t) { return std::exp(-t); };
    CHECK_THROWS_AS(fogpss::estimate_convergence_order(linear(1.0, -1.0, 1.0, 1.0, 10), ref, {10, 20}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fogpss::estimate_convergence_order(linear(1.0, -1.0, 1.0, 1.0, 10), ref, {10, 40, 20}),
                    std::invalid_argument);
  }
}
