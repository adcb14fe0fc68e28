#include "fogpss/controllers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using fogpss::FogpssConfig;
using fogpss::PssGains;
using fogpss::SampledSignal;

namespace {

FogpssConfig fig5_design() { return FogpssConfig(10.0, 12.0, 0.3, 0.3, 5.5); }

SampledSignal<double> ramp(double slope, double offset, double h, fogpss::Index n) {
  return SampledSignal<double>::sample(0.0, h, n, [=](double t) { return offset + slope * t; });
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("bound radii") {
  CHECK(fogpss::fogpss_bound_radius(fig5_design(), 0.1, 1.5) == doctest::Approx(1.81));
  CHECK(fogpss::fogpss_bound_radius(fig5_design(), 0.0, 0.0) == doctest::Approx(0.3));
  CHECK(fogpss::fogpss_bound_radius(FogpssConfig(1.0, 10.0, 0.5, 0.5, 1.0), 1.0, 0.5) == doctest::Approx(2.0));

  CHECK(fogpss::pss_bound_radius(5.0, 0.2, 0.05, 0.5) == doctest::Approx(0.71));
  CHECK(fogpss::pss_bound_radius(5.0, 0.2, 0.0, 0.0) == doctest::Approx(0.2));
  CHECK(fogpss::pss_derivative_bound(5.0, 0.2, 0.05, 0.5) == doctest::Approx(7.1));
  CHECK(fogpss::pss_derivative_bound(5.0, 0.2, 0.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("minimum gain and its strict boundary") {
  CHECK(fogpss::fogpss_min_gain(5.5, 10.0, 0.3) == doctest::Approx(1.8333333333));
  CHECK(fogpss::fogpss_min_gain(0.0, 10.0, 0.3) == 0.0);
  CHECK(fogpss::fogpss_min_gain(2.0, 4.0, 0.5) == 1.0);

  CHECK_THROWS_AS(FogpssConfig(4.0, 1.0, 0.5, 0.5, 2.0), std::invalid_argument);
  CHECK_NOTHROW(FogpssConfig(4.0, std::nextafter(1.0, 2.0), 0.5, 0.5, 2.0));
  CHECK_THROWS_AS(FogpssConfig(4.0, 0.9, 0.5, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FogpssConfig(4.0, 2.0, 0.5, 1.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(FogpssConfig(-1.0, 2.0, 0.5, 0.5, 2.0), std::invalid_argument);

  CHECK(fig5_design().beta_hat() == doctest::Approx(2.5416666667));
}

TEST_CASE("PSS gain condition") {
  // u_max / (rho epsilon) = 0.7 / 1 = 0.7.
  CHECK_THROWS_AS(PssGains(vec({0.7}), vec({5.0}), 0.2, vec({0.7})), std::invalid_argument);
  CHECK_NOTHROW(PssGains(vec({0.71}), vec({5.0}), 0.2, vec({0.7})));
  CHECK_THROWS_AS(PssGains(vec({30.0, 30.0}), vec({5.0}), 0.2, vec({0.7, 0.7})), std::invalid_argument);
  const PssGains g(vec({30.0, 10.0}), vec({5.0, 5.0}), 0.2, vec({0.7, 0.7}));
  CHECK(g.eta()[0] == doctest::Approx(1.0 - 0.7 / 30.0));
  CHECK(g.eta()[1] == doctest::Approx(1.0 - 0.07));
}

TEST_CASE("FOGPSS control law") {
  const auto cfg = fig5_design();
  const double h = 0.01;
  CHECK(fogpss::fogpss_control(ramp(0.0, 0.0, h, 50), cfg) == 0.0);
  // Constant error: the Caputo term vanishes.
  CHECK(fogpss::fogpss_control(ramp(0.0, 0.2, h, 50), cfg) == doctest::Approx(12.0 * 10.0 * 0.2));
  // x~ = t up to t = 1: beta_bar (1/Gamma(1.7) + delta).
  const double oracle = 12.0 * (1.0 / std::tgamma(1.7) + 10.0);
  CHECK(std::abs(fogpss::fogpss_control(ramp(1.0, 0.0, h, 101), cfg) - oracle) <= 1e-9);
  CHECK(oracle == doctest::Approx(133.21).epsilon(1e-4));

  const auto a = ramp(0.3, 0.1, h, 80);
  const auto b = SampledSignal<double>::sample(0.0, h, 80, [](double t) { return std::sin(3.0 * t); });
  const auto ab = a.with_values(2.0 * a.values() - 0.5 * b.values());
  CHECK(fogpss::fogpss_control(ab, cfg) ==
        doctest::Approx(2.0 * fogpss::fogpss_control(a, cfg) - 0.5 * fogpss::fogpss_control(b, cfg)));

  const Eigen::VectorXd raw = a.values();
  CHECK(fogpss::fogpss_control(raw, h, cfg) == fogpss::fogpss_control(a, cfg));
  CHECK_THROWS_AS(fogpss::fogpss_control(Eigen::VectorXd(), h, cfg), std::invalid_argument);
}

TEST_CASE("PSS control law") {
  const PssGains g(vec({2.0}), vec({1.0}), 1.0, vec({1.0}));
  const double h = 0.01;
  CHECK(fogpss::pss_control({ramp(0.0, 0.0, h, 10)}, g)[0] == 0.0);
  CHECK(fogpss::pss_control({ramp(0.0, 0.5, h, 10)}, g)[0] == doctest::Approx(-2.0 * 1.0 * 0.5));
  CHECK(fogpss::pss_control({ramp(1.0, 0.0, h, 301)}, g)[0] == doctest::Approx(-8.0));
  CHECK_THROWS_AS(fogpss::pss_control({ramp(1.0, 0.0, h, 1)}, g), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::pss_control({}, g), std::invalid_argument);
}

TEST_CASE("lambda tracker") {
  const Eigen::VectorXd e = vec({1.0});
  SUBCASE("integer order is an Euler step") {
    const auto out = fogpss::lambda_tracker_step(fogpss::LambdaTrackerState(0.0, 0.1, 1.0), e, 0.01);
    CHECK(out.state.k == doctest::Approx(0.009));
    CHECK(out.u[0] == doctest::Approx(-0.009));
  }
  SUBCASE("constant rate inside one episode") {
    // D^a k = f with f constant gives k0 + f t^a / Gamma(1 + a).
    fogpss::LambdaTrackerState s(0.5, 0.1, 0.6, fogpss::AdaptationLaw::squared_norm);
    const double h = 0.02;
    for (int n = 0; n < 50; ++n) s = fogpss::lambda_tracker_step(s, e, h).state;
    CHECK(s.k == doctest::Approx(0.5 + std::pow(1.0, 0.6) / std::tgamma(1.6)));
  }
  SUBCASE("held below the threshold") {
    fogpss::LambdaTrackerState s(0.3, 0.1, 0.5);
    const auto out = fogpss::lambda_tracker_step(s, vec({0.05}), 0.01);
    CHECK(out.state.k == 0.3);
    CHECK(out.state.episode_rates.empty());
    CHECK(out.u[0] == doctest::Approx(-0.015));
  }
  SUBCASE("gain never decreases") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.3);
    fogpss::LambdaTrackerState s(0.0, 0.1, 0.4);
    double prev = s.k;
    for (int k = 0; k < 2000; ++k) {
      s = fogpss::lambda_tracker_step(s, vec({n(rng), n(rng)}), 0.01).state;
      CHECK(s.k >= prev);
      prev = s.k;
    }
    CHECK(prev > 0.0);
  }
  SUBCASE("adaptation laws") {
    CHECK(fogpss::adaptation_rate(fogpss::AdaptationLaw::excess_times_norm, 2.0, 0.5) == 3.0);
    CHECK(fogpss::adaptation_rate(fogpss::AdaptationLaw::squared_norm, 2.0, 0.5) == 4.0);
    CHECK(fogpss::parse_adaptation_law("squared_norm") == fogpss::AdaptationLaw::squared_norm);
    CHECK(fogpss::to_string(fogpss::AdaptationLaw::excess_times_norm) == "excess_times_norm");
    CHECK_THROWS_AS(fogpss::parse_adaptation_law("cubic"), std::invalid_argument);
    CHECK_THROWS_AS(fogpss::lambda_tracker_step(fogpss::LambdaTrackerState(0.0, 0.1, 0.5), e, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("saturation") {
  using K = fogpss::SaturationKind;
  CHECK(fogpss::saturate(0.0, 2.0, K::tanh) == 0.0);
  CHECK(fogpss::saturate(1e9, 2.0, K::atan) == doctest::Approx(2.0));
  CHECK(fogpss::saturate(3.0, 2.0, K::clip) == 2.0);
  CHECK(fogpss::saturate(-0.5, 2.0, K::clip) == -0.5);
  CHECK(fogpss::saturate(1.0, 2.0, K::tanh) == doctest::Approx(2.0 * std::tanh(1.0)));
  CHECK_THROWS_AS(fogpss::saturate(1.0, 0.0, K::tanh), std::invalid_argument);

  std::mt19937_64 rng(1);
  std::cauchy_distribution<double> z(0.0, 10.0);
  std::uniform_real_distribution<double> eps(0.01, 10.0);
  for (int i = 0; i < 100000; ++i) {
    const double v = z(rng), e = eps(rng);
    for (K k : {K::tanh, K::atan, K::clip}) {
      const double s = fogpss::saturate(v, e, k);
      REQUIRE(std::abs(s) <= e);
      REQUIRE(s * v >= 0.0);
      REQUIRE(fogpss::saturate(-v, e, k) == -s);
    }
  }
}
