#include "fogpss/plants.hpp"

#include <cmath>
#include <sstream>

namespace fogpss {

namespace {

std::string violation_message(int assumption, const std::string& quantity, double t, double value,
                              double bound) {
  std::ostringstream os;
  os << "Assumption " << assumption << " violated at t = " << t << ": |" << quantity
     << "| = " << std::abs(value) << " exceeds bound " << bound;
  return os.str();
}

}  // namespace

AssumptionViolation::AssumptionViolation(int assumption, std::string quantity, double t,
                                         double value, double bound)
    : std::runtime_error(violation_message(assumption, quantity, t, value, bound)),
      assumption_(assumption),
      t_(t),
      value_(value) {}

CatalogFunction::CatalogFunction(Kind kind, double amplitude, double frequency)
    : kind_(kind), amplitude_(amplitude), frequency_(frequency) {
  if (!std::isfinite(amplitude) || !std::isfinite(frequency)) {
    throw std::invalid_argument("catalog function: non-finite parameter");
  }
}

CatalogFunction CatalogFunction::parse(std::string_view name, std::span<const double> params) {
  auto expect = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument("catalog function '" + std::string(name) + "' takes " +
                                  std::to_string(n) + " parameter(s), got " +
                                  std::to_string(params.size()));
    }
  };
  if (name == "zero") {
    expect(0);
    return {Kind::zero, 0.0};
  }
  if (name == "constant") {
    expect(1);
    return {Kind::constant, params[0]};
  }
  const std::pair<std::string_view, Kind> two_param[] = {{"sin_product", Kind::sin_product},
                                                         {"cos_product", Kind::cos_product},
                                                         {"sin_time", Kind::sin_time},
                                                         {"cos_time", Kind::cos_time}};
  for (const auto& [n, k] : two_param) {
    if (name == n) {
      expect(2);
      return {k, params[0], params[1]};
    }
  }
  throw std::invalid_argument("unknown catalog function '" + std::string(name) + "'");
}

double CatalogFunction::operator()(double x, double t) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::constant: return amplitude_;
    case Kind::sin_product: return amplitude_ * std::sin(frequency_ * x * t);
    case Kind::cos_product: return amplitude_ * std::cos(frequency_ * x * t);
    case Kind::sin_time: return amplitude_ * std::sin(frequency_ * t);
    case Kind::cos_time: return amplitude_ * std::cos(frequency_ * t);
  }
  return 0.0;
}

double CatalogFunction::time_derivative(double t) const {
  switch (kind_) {
    case Kind::zero:
    case Kind::constant: return 0.0;
    case Kind::sin_time: return amplitude_ * frequency_ * std::cos(frequency_ * t);
    case Kind::cos_time: return -amplitude_ * frequency_ * std::sin(frequency_ * t);
    default: break;
  }
  throw std::logic_error("catalog function " + describe() + " depends on the state");
}

double CatalogFunction::bound() const { return std::abs(amplitude_); }

std::string CatalogFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::constant: os << "constant " << amplitude_; return os.str();
    case Kind::sin_product: os << "sin_product "; break;
    case Kind::cos_product: os << "cos_product "; break;
    case Kind::sin_time: os << "sin_time "; break;
    case Kind::cos_time: os << "cos_time "; break;
  }
  os << amplitude_ << ' ' << frequency_;
  return os.str();
}

FirstOrderPlant::FirstOrderPlant(double a_p, double b_p, CatalogFunction disturbance,
                                 PlantBounds bounds)
    : a_p_(a_p), b_p_(b_p), disturbance_(disturbance), bounds_(bounds) {
  const auto& b = bounds_;
  if (!(b.a_lo > 0 && b.a_hi >= b.a_lo && b.b_lo > 0 && b.b_hi >= b.b_lo && b.d_bar > 0)) {
    throw std::invalid_argument("plant bounds must be positive with lo <= hi");
  }
  if (!(std::abs(a_p) >= b.a_lo && std::abs(a_p) <= b.a_hi)) {
    throw std::invalid_argument("plant: |a_p| = " + std::to_string(std::abs(a_p)) +
                                " outside [a_lo, a_hi] (Assumption 2)");
  }
  if (!(std::abs(b_p) >= b.b_lo && std::abs(b_p) <= b.b_hi)) {
    throw std::invalid_argument("plant: |b_p| = " + std::to_string(std::abs(b_p)) +
                                " outside [b_lo, b_hi] (Assumption 2)");
  }
}

double FirstOrderPlant::disturbance_at(double x, double t) const {
  const double d = disturbance_(x, t);
  if (std::abs(d) > bounds_.d_bar) throw AssumptionViolation(2, "d(x,t)", t, d, bounds_.d_bar);
  return d;
}

double FirstOrderPlant::rate(double x, double u, double t) const {
  return -a_p_ * x + b_p_ * u + disturbance_at(x, t);
}

double plant_step_rk4(const FirstOrderPlant& plant, double x, double u, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("plant_step_rk4: h must be > 0");
  if (!std::isfinite(u)) throw std::invalid_argument("plant_step_rk4: non-finite input");
  const double k1 = plant.rate(x, u, t);
  const double k2 = plant.rate(x + 0.5 * h * k1, u, t + 0.5 * h);
  const double k3 = plant.rate(x + 0.5 * h * k2, u, t + 0.5 * h);
  const double k4 = plant.rate(x + h * k3, u, t + h);
  const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(next)) {
    throw std::runtime_error("plant_step_rk4: state blew up at t = " + std::to_string(t));
  }
  return next;
}

ReferenceSpec::ReferenceSpec(CatalogFunction shape, double pos_bound, double vel_bound)
    : x_d(shape), b1(pos_bound), b2(vel_bound) {
  if (shape.depends_on_state()) {
    throw std::invalid_argument("reference must be a function of time only");
  }
  if (!(b1 > 0.0 && b2 > 0.0)) throw std::invalid_argument("reference bounds must be > 0");
}

ReferenceSample reference_eval(const ReferenceSpec& ref, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("reference_eval: t must be >= 0");
  const ReferenceSample s{ref.x_d(0.0, t), ref.x_d.time_derivative(t)};
  if (std::abs(s.x_d) > ref.b1) throw AssumptionViolation(1, "x_d", t, s.x_d, ref.b1);
  if (std::abs(s.xdot_d) > ref.b2 * (1.0 + 1e-6)) {
    throw AssumptionViolation(1, "xdot_d", t, s.xdot_d, ref.b2);
  }
  return s;
}

double estimate_u_max(const PlantBounds& bounds, const ReferenceSpec& reference, double x_abs_bound) {
  if (!(bounds.b_lo > 0.0)) throw std::invalid_argument("estimate_u_max: b_lo must be > 0");
  return (reference.b2 + bounds.a_hi * x_abs_bound + bounds.d_bar) / bounds.b_lo;
}

MeasurementModel::MeasurementModel(CatalogFunction w, double bound1, double bound2, double order)
    : omega(w), c1(bound1), c2(bound2), alpha(order) {
  if (!(c1 >= 0.0 && c2 >= 0.0)) throw std::invalid_argument("measurement bounds must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("measurement order must lie in (0, 1]");
  }
}

RobotPlant::RobotPlant(Eigen::MatrixXd inertia, std::vector<CatalogFunction> disturbance,
                       Eigen::VectorXd d_bar)
    : inertia_(std::move(inertia)), disturbance_(std::move(disturbance)), d_bar_(std::move(d_bar)) {
  const auto n = inertia_.rows();
  if (n == 0 || inertia_.cols() != n) throw std::invalid_argument("robot: inertia must be square");
  if (!inertia_.isApprox(inertia_.transpose())) {
    throw std::invalid_argument("robot: inertia must be symmetric");
  }
  llt_.compute(inertia_);
  if (llt_.info() != Eigen::Success) {
    throw std::invalid_argument("robot: inertia must be positive definite");
  }
  if (static_cast<Eigen::Index>(disturbance_.size()) != n || d_bar_.size() != n) {
    throw std::invalid_argument("robot: one disturbance and one bound per joint");
  }
}

Eigen::VectorXd RobotPlant::disturbance_at(const Eigen::VectorXd& q, double t) const {
  Eigen::VectorXd d(joints());
  for (Eigen::Index i = 0; i < joints(); ++i) {
    d[i] = disturbance_[static_cast<std::size_t>(i)](q[i], t);
    if (std::abs(d[i]) > d_bar_[i]) {
      throw AssumptionViolation(2, "d_" + std::to_string(i + 1), t, d[i], d_bar_[i]);
    }
  }
  return d;
}

void RobotPlant::step_rk4(Eigen::VectorXd& q, Eigen::VectorXd& qdot, const Eigen::VectorXd& tau,
                          double t, double h) const {
  auto accel = [&](const Eigen::VectorXd& qq, double tt) -> Eigen::VectorXd {
    return llt_.solve(tau - disturbance_at(qq, tt));
  };
  const Eigen::VectorXd k1q = qdot;
  const Eigen::VectorXd k1v = accel(q, t);
  const Eigen::VectorXd k2q = qdot + 0.5 * h * k1v;
  const Eigen::VectorXd k2v = accel(q + 0.5 * h * k1q, t + 0.5 * h);
  const Eigen::VectorXd k3q = qdot + 0.5 * h * k2v;
  const Eigen::VectorXd k3v = accel(q + 0.5 * h * k2q, t + 0.5 * h);
  const Eigen::VectorXd k4q = qdot + h * k3v;
  const Eigen::VectorXd k4v = accel(q + h * k3q, t + h);
  q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
  qdot += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  if (!q.allFinite() || !qdot.allFinite()) {
    throw std::runtime_error("robot: state blew up at t = " + std::to_string(t));
  }
}

}  // namespace fogpss
