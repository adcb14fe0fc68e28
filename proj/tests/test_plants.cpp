#include "fogpss/plants.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using fogpss::CatalogFunction;
using fogpss::FirstOrderPlant;
using fogpss::PlantBounds;
using Kind = fogpss::CatalogFunction::Kind;

namespace {

const PlantBounds kBounds{0.5, 1.5, 1.0, 2.0, 0.5};

FirstOrderPlant plant(CatalogFunction d = {}) { return FirstOrderPlant(1.0, 1.5, d, kBounds); }

// Forward Euler with a tiny step as an independent integrator.
double euler(const FirstOrderPlant& p, double x, double u, double t0, double T, int steps) {
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) x += h * p.rate(x, u, t0 + k * h);
  return x;
}

}  // namespace

TEST_CASE("catalog functions") {
  const std::array<double, 2> p{0.5, 2.0};
  const auto s = CatalogFunction::parse("sin_product", p);
  CHECK(s(1.0, 0.25) == doctest::Approx(0.5 * std::sin(0.5)));
  CHECK(s.depends_on_state());
  CHECK(s.bound() == 0.5);
  CHECK(s.describe() == "sin_product 0.5 2");
  CHECK_THROWS_AS(s.time_derivative(0.0), std::logic_error);

  const auto c = CatalogFunction::parse("cos_time", p);
  CHECK(c(99.0, 1.0) == doctest::Approx(0.5 * std::cos(2.0)));
  CHECK(c.time_derivative(1.0) == doctest::Approx(-1.0 * std::sin(2.0)));
  CHECK_FALSE(c.depends_on_state());

  const auto st = CatalogFunction::parse("sin_time", p);
  CHECK(st.time_derivative(0.3) == doctest::Approx(0.5 * 2.0 * std::cos(0.6)));

  const std::array<double, 1> one{-3.0};
  const auto k = CatalogFunction::parse("constant", one);
  CHECK(k(1.0, 2.0) == -3.0);
  CHECK(k.time_derivative(5.0) == 0.0);
  CHECK(k.bound() == 3.0);
  CHECK(CatalogFunction::parse("zero", {})(4.0, 4.0) == 0.0);

  CHECK_THROWS_AS(CatalogFunction::parse("tan_time", p), std::invalid_argument);
  CHECK_THROWS_AS(CatalogFunction::parse("sin_time", one), std::invalid_argument);
  CHECK_THROWS_AS(CatalogFunction::parse("zero", one), std::invalid_argument);
  CHECK_THROWS_AS(CatalogFunction(Kind::constant, std::nan("")), std::invalid_argument);
}

TEST_CASE("plant parameter bounds") {
  CHECK_NOTHROW(FirstOrderPlant(-1.5, 2.0, {}, kBounds));
  CHECK_THROWS_AS(FirstOrderPlant(2.0, 1.5, {}, kBounds), std::invalid_argument);
  CHECK_THROWS_AS(FirstOrderPlant(1.0, 0.9, {}, kBounds), std::invalid_argument);
  CHECK_THROWS_AS(FirstOrderPlant(1.0, 1.5, {}, PlantBounds{1.5, 0.5, 1.0, 2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("disturbance bound is asserted") {
  const std::array<double, 1> big{0.8};
  const auto p = plant(CatalogFunction::parse("constant", big));
  try {
    (void)p.rate(0.0, 0.0, 1.0);
    FAIL("expected a violation");
  } catch (const fogpss::AssumptionViolation& e) {
    CHECK(e.assumption() == 2);
    CHECK(e.time() == 1.0);
    CHECK(e.value() == 0.8);
  }
}

TEST_CASE("RK4 step") {
  const auto p = plant();
  CHECK(std::abs(fogpss::plant_step_rk4(p, 1.0, 0.0, 0.0, 0.01) - std::exp(-0.01)) <= 1e-9);
  // -x + 1.5 u = 0 at x = 1.5, u = 1.
  CHECK(fogpss::plant_step_rk4(p, 1.5, 1.0, 3.0, 0.1) == doctest::Approx(1.5).epsilon(1e-15));

  const std::array<double, 2> dp{0.5, 1.0};
  const auto pd = plant(CatalogFunction::parse("sin_product", dp));
  const double rk = fogpss::plant_step_rk4(pd, 0.3, 1.0, 2.0, 0.01);
  CHECK(std::abs(rk - euler(pd, 0.3, 1.0, 2.0, 0.01, 10000)) <= 1e-7);

  CHECK_THROWS_AS(fogpss::plant_step_rk4(p, 1.0, 0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::plant_step_rk4(p, 1.0, INFINITY, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("RK4 is fourth order") {
  const std::array<double, 2> dp{0.5, 3.0};
  const auto p = plant(CatalogFunction::parse("sin_time", dp));
  auto run = [&](int n) {
    double x = -1.0;
    const double h = 2.0 / n;
    for (int k = 0; k < n; ++k) x = fogpss::plant_step_rk4(p, x, 0.2, k * h, h);
    return x;
  };
  const double ref = run(20000);
  const double e1 = std::abs(run(40) - ref), e2 = std::abs(run(80) - ref);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("RK4 one-step error shrinks at least 16x per halving") {
  const auto p = plant();
  auto err = [&](double h) { return std::abs(fogpss::plant_step_rk4(p, 1.0, 0.0, 0.0, h) - std::exp(-h)); };
  for (double h : {0.4, 0.2, 0.1}) CHECK(err(h) / err(h / 2) >= 16.0);
}

TEST_CASE("references") {
  const std::array<double, 2> rp{0.5, 0.4};
  const fogpss::ReferenceSpec ref(CatalogFunction::parse("cos_time", rp), 3.0, 0.5);
  const auto s0 = fogpss::reference_eval(ref, 0.0);
  CHECK(s0.x_d == 0.5);
  CHECK(s0.xdot_d == 0.0);
  CHECK(fogpss::reference_eval(ref, 2.0).xdot_d == doctest::Approx(-0.2 * std::sin(0.8)));

  const fogpss::ReferenceSpec tight(CatalogFunction::parse("cos_time", rp), 0.4, 0.5);
  try {
    (void)fogpss::reference_eval(tight, 0.0);
    FAIL("expected a violation");
  } catch (const fogpss::AssumptionViolation& e) {
    CHECK(e.assumption() == 1);
  }
  const fogpss::ReferenceSpec slow(CatalogFunction::parse("cos_time", rp), 3.0, 0.1);
  CHECK_THROWS_AS(fogpss::reference_eval(slow, 2.0), fogpss::AssumptionViolation);

  const std::array<double, 1> c{0.7};
  const fogpss::ReferenceSpec flat(CatalogFunction::parse("constant", c), 1.0, 0.1);
  CHECK(fogpss::reference_eval(flat, 12.0).xdot_d == 0.0);

  const std::array<double, 2> sp{0.5, 1.0};
  CHECK_THROWS_AS(fogpss::ReferenceSpec(CatalogFunction::parse("sin_product", sp), 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::ReferenceSpec(CatalogFunction::parse("constant", c), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::reference_eval(flat, -1.0), std::invalid_argument);
}

TEST_CASE("input bound estimate") {
  fogpss::ReferenceSpec ref;
  ref.b2 = 0.5;
  CHECK(fogpss::estimate_u_max(kBounds, ref, 3.0) == doctest::Approx(5.5));
  CHECK(fogpss::estimate_u_max(PlantBounds{0.5, 1.0, 1.0, 2.0, 0.5}, ref, 0.5) == doctest::Approx(1.5));
  ref.b2 = 0.0;
  CHECK(fogpss::estimate_u_max(PlantBounds{0.0, 0.0, 1.0, 1.0, 0.0}, ref, 0.0) == 0.0);
  CHECK_THROWS_AS(fogpss::estimate_u_max(PlantBounds{}, ref, 1.0), std::invalid_argument);
}

TEST_CASE("measurement model") {
  CHECK_NOTHROW(fogpss::MeasurementModel({}, 0.0, 0.0, 0.3));
  CHECK_THROWS_AS(fogpss::MeasurementModel({}, -0.1, 0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::MeasurementModel({}, 0.1, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fogpss::MeasurementModel({}, 0.1, 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("robot plant") {
  Eigen::MatrixXd M(2, 2);
  M << 2, 0, 0, 4;
  const std::vector<CatalogFunction> none(2);
  const fogpss::RobotPlant robot(M, none, Eigen::Vector2d::Zero());
  CHECK(robot.joints() == 2);

  SUBCASE("constant torque integrates exactly") {
    Eigen::VectorXd q = Eigen::Vector2d(1.0, -1.0), v = Eigen::Vector2d(0.5, 0.0);
    const Eigen::VectorXd tau = Eigen::Vector2d(1.0, 2.0);
    const double h = 0.1;
    robot.step_rk4(q, v, tau, 0.0, h);
    CHECK(q[0] == doctest::Approx(1.0 + 0.5 * h + 0.25 * h * h));
    CHECK(q[1] == doctest::Approx(-1.0 + 0.25 * h * h));
    CHECK(v[0] == doctest::Approx(0.5 + 0.5 * h));
    CHECK(v[1] == doctest::Approx(0.5 * h));
  }
  SUBCASE("construction checks") {
    Eigen::MatrixXd asym = M;
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(fogpss::RobotPlant(asym, none, Eigen::Vector2d::Zero()), std::invalid_argument);
    CHECK_THROWS_AS(fogpss::RobotPlant(-M, none, Eigen::Vector2d::Zero()), std::invalid_argument);
    CHECK_THROWS_AS(fogpss::RobotPlant(Eigen::MatrixXd(2, 3), none, Eigen::Vector2d::Zero()), std::invalid_argument);
    CHECK_THROWS_AS(fogpss::RobotPlant(M, std::vector<CatalogFunction>(1), Eigen::Vector2d::Zero()),
                    std::invalid_argument);
  }
  SUBCASE("joint disturbance bound") {
    const std::array<double, 1> c{1.0};
    const fogpss::RobotPlant loud(M, {CatalogFunction::parse("constant", c), {}}, Eigen::Vector2d(0.5, 0.5));
    CHECK_THROWS_AS(loud.disturbance_at(Eigen::Vector2d::Zero(), 0.0), fogpss::AssumptionViolation);
  }
}
