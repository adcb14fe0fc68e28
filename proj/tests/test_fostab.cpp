#include "fogpss/fde_abm.hpp"
#include "fogpss/fostab.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using fogpss::LinearFoSystem;
using Eigen::MatrixXd;

namespace {
constexpr double kPi = std::numbers::pi;

fogpss::StabilityVerdict verdict(const MatrixXd& A, double alpha) {
  return fogpss::check_linear_fo_stability(LinearFoSystem(A, alpha));
}

// Final |x| of D^a x = A x from x0 = (1, ..., 1).
double decay(const MatrixXd& A, double alpha, double T, fogpss::Index N) {
  fogpss::FdeProblem p;
  p.alpha = alpha;
  p.rhs = [A](double, const fogpss::State& x) { return fogpss::State(A * x); };
  p.x0 = {fogpss::State::Ones(A.rows())};
  p.horizon = T;
  p.steps = N;
  return fogpss::abm_solve(p).states.back().norm();
}
}  // namespace

TEST_CASE("scalar examples") {
  const auto neg = verdict(MatrixXd::Constant(1, 1, -1.0), 0.5);
  CHECK(neg.stable);
  CHECK(neg.margin == doctest::Approx(0.75 * kPi));
  CHECK(neg.eigen_args.size() == 1);

  const auto pos = verdict(MatrixXd::Constant(1, 1, 1.0), 0.5);
  CHECK_FALSE(pos.stable);
  CHECK(pos.margin == doctest::Approx(-0.25 * kPi));
}

TEST_CASE("rotation generator") {
  MatrixXd A(2, 2);
  A << 0, 1, -1, 0;
  const auto half = verdict(A, 0.5);
  CHECK(half.stable);
  CHECK(half.margin == doctest::Approx(kPi / 4));
  // At alpha = 1 the eigenvalues sit on the boundary: not asymptotically stable.
  const auto one = verdict(A, 1.0);
  CHECK_FALSE(one.stable);
  CHECK(std::abs(one.margin) < 1e-12);
  // Numerically: alpha = 0.5 decays, alpha = 1 keeps |x| = sqrt(2).
  CHECK(decay(A, 0.5, 40.0, 4000) < 0.2);
  CHECK(decay(A, 1.0, 40.0, 4000) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("zero eigenvalue is never stable") {
  for (double alpha : {0.2, 0.5, 1.0}) {
    MatrixXd A(2, 2);
    A << 0, 0, 0, -1;
    const auto v = verdict(A, alpha);
    CHECK_FALSE(v.stable);
    CHECK(v.margin == doctest::Approx(-alpha * kPi / 2));
  }
}

TEST_CASE("invalid systems") {
  CHECK_THROWS_AS(LinearFoSystem(MatrixXd(2, 3), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(LinearFoSystem(MatrixXd(0, 0), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(LinearFoSystem(MatrixXd::Identity(2, 2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LinearFoSystem(MatrixXd::Identity(2, 2), 1.2), std::invalid_argument);
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(LinearFoSystem(bad, 0.5), std::invalid_argument);
}

TEST_CASE("verdict is invariant under similarity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), s(0.7, 1.4), a(0.1, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd A = MatrixXd::NullaryExpr(3, 3, [&] { return u(rng); });
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(MatrixXd::NullaryExpr(3, 3, [&] { return u(rng); })).householderQ();
    const MatrixXd P = Q * Eigen::Vector3d(s(rng), s(rng), s(rng)).asDiagonal();
    const double alpha = a(rng);
    const auto v1 = verdict(A, alpha);
    const auto v2 = verdict(P * A * P.inverse(), alpha);
    CHECK(std::abs(v1.margin - v2.margin) <= 1e-8);
    if (std::abs(v1.margin) > 1e-8) CHECK(v1.stable == v2.stable);
  }
}

TEST_CASE("alpha = 1 agrees with the Hurwitz test") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd A = MatrixXd::NullaryExpr(4, 4, [&] { return u(rng); });
    const Eigen::VectorXcd ev = A.eigenvalues();
    const double max_re = ev.real().maxCoeff();
    if (std::abs(max_re) < 1e-9) continue;
    CHECK(verdict(A, 1.0).stable == (max_re < 0.0));
  }
}

TEST_CASE("smaller order never shrinks the stable set") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd A = MatrixXd::NullaryExpr(3, 3, [&] { return u(rng); });
    if (verdict(A, 0.9).stable) CHECK(verdict(A, 0.4).stable);
  }
}

TEST_CASE("Lyapunov inequality audit") {
  const double h = 0.01;
  SUBCASE("constant signal is exact") {
    const auto s = fogpss::SampledSignal<double>::sample(0.0, h, 200, [](double) { return 2.0; });
    const auto r = fogpss::audit_lemma1(s, 0.5);
    CHECK(r.pass);
    CHECK(std::abs(r.max_violation) <= 1e-12);
  }
  SUBCASE("linear signal leaves a positive gap") {
    // x = t: x D^a x - 1/2 D^a x^2 = (1-a) t^(2-a) / Gamma(3-a) >= 0.
    const double alpha = 0.4;
    const auto s = fogpss::SampledSignal<double>::sample(0.0, h, 301, [](double t) { return t; });
    const auto r = fogpss::audit_lemma1(s, alpha);
    CHECK(r.pass);
    const auto lhs = fogpss::caputo_derivative(s.with_values(s.values().array().square()), fogpss::FracOrder(alpha));
    const double t = 3.0;
    const double gap = (1.0 - alpha) * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha);
    const double discrete_gap = t * std::pow(t, 1.0 - alpha) / std::tgamma(2.0 - alpha) - 0.5 * lhs[300];
    CHECK(discrete_gap == doctest::Approx(gap).epsilon(1e-2));
  }
  SUBCASE("oscillating signal at low order") {
    const auto s = fogpss::SampledSignal<double>::sample(0.0, h, 1001, [](double t) { return std::sin(t); });
    const auto r = fogpss::audit_lemma1(s, 0.3);
    CHECK(r.pass);
    CHECK(r.tolerance > 0.0);
  }
  SUBCASE("preconditions") {
    const auto s = fogpss::SampledSignal<double>::sample(0.0, h, 2, [](double t) { return t; });
    CHECK_THROWS_AS(fogpss::audit_lemma1(s, 0.5), std::invalid_argument);
  }
}
