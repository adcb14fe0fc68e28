#include "fogpss/simkit.hpp"

#include "fogpss/fostab.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

namespace fogpss {

namespace {

constexpr Index kMaxSteps = 1'000'000;

Index grid_steps(double h, double T) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("sim: h must be finite and > 0");
  if (!(T >= h) || !std::isfinite(T)) throw std::invalid_argument("sim: horizon T must be >= h");
  const double ratio = T / h;
  if (ratio > static_cast<double>(kMaxSteps)) {
    throw std::invalid_argument("sim: T/h exceeds the 1e6 step limit");
  }
  return static_cast<Index>(std::floor(ratio + 1e-9));
}

// Controller with memory, evaluated at the next node for a candidate
// measurement and then committed.
class ControllerRuntime {
 public:
  ControllerRuntime(const ControllerSpec& spec, double h, Index capacity) : h_(h) {
    if (const auto* f = std::get_if<FogpssConfig>(&spec)) {
      fogpss_ = *f;
      caputo_.emplace(h, FracOrder(f->alpha), capacity);
    } else if (const auto* l = std::get_if<LambdaTrackerSpec>(&spec)) {
      tracker_.emplace(l->k0, l->lambda, l->alpha, l->law);
    }
  }

  double output(double xe_tilde) const {
    if (fogpss_) return fogpss_->beta_bar * (caputo_->next(xe_tilde) + fogpss_->delta * xe_tilde);
    if (tracker_) return lambda_tracker_step(*tracker_, error_vector(xe_tilde), h_).u[0];
    return 0.0;
  }

  void commit(double xe_tilde) {
    if (caputo_) caputo_->push(xe_tilde);
    if (tracker_) tracker_ = lambda_tracker_step(std::move(*tracker_), error_vector(xe_tilde), h_).state;
  }

  std::optional<double> gain() const {
    if (tracker_) return tracker_->k;
    return std::nullopt;
  }

 private:
  // The lambda-tracker regulates e = y - y_r = -x~_e.
  static Eigen::VectorXd error_vector(double xe_tilde) {
    return Eigen::VectorXd::Constant(1, -xe_tilde);
  }

  double h_;
  std::optional<FogpssConfig> fogpss_;
  std::optional<CaputoL1Stepper> caputo_;
  std::optional<LambdaTrackerState> tracker_;
};

struct Measurement {
  double x_d;
  double x_e;
  double omega;
  double integral;
  double xe_tilde;
};

}  // namespace

void SimConfig::validate() const {
  (void)steps();
  if (!std::isfinite(x0)) throw std::invalid_argument("sim: non-finite initial state");
  if (const auto* f = std::get_if<FogpssConfig>(&controller)) {
    if (f->alpha != measurement.alpha) {
      throw std::invalid_argument("sim: FOGPSS alpha must match the measurement alpha");
    }
  }
}

Index SimConfig::steps() const { return grid_steps(h, T); }

std::string config_hash(const std::string& canonical) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string canonical_description(const SimConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const auto& b = c.plant.bounds();
  os << "plant first_order a_p=" << c.plant.a_p() << " b_p=" << c.plant.b_p() << " a=[" << b.a_lo
     << ',' << b.a_hi << "] b=[" << b.b_lo << ',' << b.b_hi << "] d_bar=" << b.d_bar
     << " d=" << c.plant.disturbance().describe() << '\n';
  os << "reference " << c.reference.x_d.describe() << " b1=" << c.reference.b1
     << " b2=" << c.reference.b2 << '\n';
  os << "measurement " << c.measurement.omega.describe() << " c1=" << c.measurement.c1
     << " c2=" << c.measurement.c2 << " alpha=" << c.measurement.alpha << '\n';
  if (const auto* f = std::get_if<FogpssConfig>(&c.controller)) {
    os << "controller fogpss delta=" << f->delta << " beta_bar=" << f->beta_bar
       << " epsilon0=" << f->epsilon0 << " alpha=" << f->alpha << " u_max=" << f->u_max << '\n';
  } else if (const auto* l = std::get_if<LambdaTrackerSpec>(&c.controller)) {
    os << "controller lambda k0=" << l->k0 << " lambda=" << l->lambda << " alpha=" << l->alpha
       << " law=" << to_string(l->law) << '\n';
  } else {
    os << "controller none\n";
  }
  os << "sim h=" << c.h << " T=" << c.T << " x0=" << c.x0 << " seed=" << c.seed
     << " coupling=" << (c.coupling == Coupling::implicit ? "implicit" : "explicit")
     << " negate_u=" << c.negate_u << '\n';
  return os.str();
}

SimTrace simulate(const SimConfig& config) {
  config.validate();
  const Index N = config.steps();
  const double h = config.h;
  const double sign = config.negate_u ? -1.0 : 1.0;
  const auto& meas = config.measurement;

  RlIntegralStepper omega_integral(h, FracOrder(meas.alpha), N + 1);
  ControllerRuntime controller(config.controller, h, N + 1);

  // Measurement at node n for plant state x; bounds asserted only for
  // accepted states.
  auto measure = [&](Index n, double x, bool check) {
    const double t = static_cast<double>(n) * h;
    Measurement m{};
    m.x_d = check ? reference_eval(config.reference, t).x_d : config.reference.x_d(0.0, t);
    m.x_e = m.x_d - x;
    m.omega = meas.omega(m.x_e, t);
    m.integral = omega_integral.next();
    m.xe_tilde = m.x_e - m.integral;
    if (check) {
      if (std::abs(m.omega) > meas.c1) throw AssumptionViolation(3, "omega", t, m.omega, meas.c1);
      if (std::abs(m.integral) > meas.c2) {
        throw AssumptionViolation(3, "I^alpha omega", t, m.integral, meas.c2);
      }
    }
    return m;
  };

  SimTrace trace;
  const auto rows = static_cast<std::size_t>(N + 1);
  for (auto* col : {&trace.t, &trace.x, &trace.x_d, &trace.x_e, &trace.xe_tilde, &trace.u}) {
    col->reserve(rows);
  }
  auto record = [&](Index n, double x, const Measurement& m, double u) {
    trace.t.push_back(static_cast<double>(n) * h);
    trace.x.push_back(x);
    trace.x_d.push_back(m.x_d);
    trace.x_e.push_back(m.x_e);
    trace.xe_tilde.push_back(m.xe_tilde);
    trace.u.push_back(u);
  };
  auto accept = [&](Index n, double x) {
    const Measurement m = measure(n, x, true);
    const double u = sign * controller.output(m.xe_tilde);
    if (!std::isfinite(u)) {
      throw std::runtime_error("simulate: non-finite control at t = " + std::to_string(n * h));
    }
    controller.commit(m.xe_tilde);
    omega_integral.push(m.omega);
    record(n, x, m, u);
    if (const auto k = controller.gain()) trace.gain.push_back(*k);
    return u;
  };

  double x = config.x0;
  double u = accept(0, x);
  for (Index n = 0; n < N; ++n) {
    const double t = static_cast<double>(n) * h;
    double next;
    if (config.coupling == Coupling::explicit_hold) {
      next = plant_step_rk4(config.plant, x, u, t, h);
    } else {
      // Solve z = RK4(x, u(z)) by secant iteration; the map is close to
      // affine in z, so a handful of iterations suffice.
      auto residual = [&](double z) {
        const double uz = sign * controller.output(measure(n + 1, z, false).xe_tilde);
        return plant_step_rk4(config.plant, x, uz, t, h) - z;
      };
      double z0 = plant_step_rk4(config.plant, x, u, t, h);
      double z1 = z0 + 1e-3 * (1.0 + std::abs(z0));
      double g0 = residual(z0);
      double g1 = residual(z1);
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        if (std::abs(g1) <= 1e-13 * (1.0 + std::abs(z1))) {
          converged = true;
          break;
        }
        if (g1 == g0) break;
        const double z2 = z1 - g1 * (z1 - z0) / (g1 - g0);
        z0 = z1;
        g0 = g1;
        z1 = z2;
        g1 = residual(z1);
      }
      if (!converged && !(std::abs(g1) <= 1e-10 * (1.0 + std::abs(z1)))) {
        throw std::runtime_error("simulate: implicit step did not converge at t = " +
                                 std::to_string(t));
      }
      next = z1;
    }
    if (!std::isfinite(next)) {
      throw std::runtime_error("simulate: state blew up at t = " + std::to_string(t));
    }
    x = next;
    u = accept(n + 1, x);
  }

  trace.config_hash = config_hash(canonical_description(config));
  if (const auto* f = std::get_if<FogpssConfig>(&config.controller)) {
    trace.bound_radius = fogpss_bound_radius(*f, meas.c1, meas.c2);
    trace.entry_time = entry_time(trace, *trace.bound_radius);
  }
  return trace;
}

std::vector<SimTrace> simulate_batch(const std::vector<SimConfig>& configs) {
  std::vector<std::future<SimTrace>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [&c] { return simulate(c); }));
  std::vector<SimTrace> out;
  out.reserve(configs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::optional<double> entry_time(const std::vector<double>& t, const std::vector<double>& values,
                                 double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("entry_time: radius must be > 0");
  if (values.empty()) return std::nullopt;
  std::size_t first = values.size();
  while (first > 0 && std::abs(values[first - 1]) <= radius) --first;
  if (first == values.size()) return std::nullopt;
  return t[first];
}

std::optional<double> entry_time(const SimTrace& trace, double radius) {
  return entry_time(trace.t, trace.x_e, radius);
}

DescentReport descent_proxy(const SimTrace& trace, double alpha, double radius) {
  DescentReport report;
  if (trace.rows() < 3) return report;
  const double h = trace.t[1] - trace.t[0];
  Vector<double> v(static_cast<Index>(trace.rows()));
  for (std::size_t i = 0; i < trace.rows(); ++i) v[static_cast<Index>(i)] = 0.5 * trace.x_e[i] * trace.x_e[i];
  const auto dv = caputo_derivative(SampledSignal<double>(trace.t.front(), h, v), FracOrder(alpha));
  double rough = 0.0;
  for (Index k = 1; k + 1 < v.size(); ++k) {
    rough = std::max(rough, std::abs(v[k + 1] - 2.0 * v[k] + v[k - 1]) / (h * h));
  }
  report.tolerance = kLemma1ToleranceFactor * std::pow(h, 2.0 - alpha) * rough;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    if (std::abs(trace.x_e[i]) > radius) {
      ++report.rows_checked;
      report.max_excess = std::max(report.max_excess, dv[static_cast<Index>(i)]);
    }
  }
  if (report.rows_checked == 0) report.max_excess = 0.0;
  report.pass = report.max_excess <= report.tolerance;
  return report;
}

void RobotExperimentConfig::validate() const {
  (void)steps();
  const auto n = plant.joints();
  const auto sz = static_cast<std::size_t>(n);
  if (reference.size() != sz || omega.size() != sz || c1.size() != n || c2.size() != n ||
      gains.joints() != n || q0.size() != n || qdot0.size() != n) {
    throw std::invalid_argument("robot experiment: every per-joint field needs one entry per joint");
  }
}

Index RobotExperimentConfig::steps() const { return grid_steps(h, T); }

RobotExperimentResult pss_robot_experiment(const RobotExperimentConfig& config) {
  config.validate();
  const Index N = config.steps();
  const Index n_joints = config.plant.joints();
  const auto joints = static_cast<std::size_t>(n_joints);
  const double h = config.h;
  const double sign = config.negate_u ? -1.0 : 1.0;

  std::vector<RlIntegralStepper> integrals;
  for (std::size_t i = 0; i < joints; ++i) integrals.emplace_back(h, FracOrder(1.0), N + 1);

  RobotExperimentResult result;
  result.joints.resize(joints);
  Eigen::VectorXd q = config.q0;
  Eigen::VectorXd qdot = config.qdot0;
  std::vector<double> prev_tilde(joints, 0.0);

  for (Index n = 0; n <= N; ++n) {
    const double t = static_cast<double>(n) * h;
    Eigen::VectorXd u(n_joints);
    for (std::size_t i = 0; i < joints; ++i) {
      const auto ii = static_cast<Index>(i);
      const double q_d = reference_eval(config.reference[i], t).x_d;
      const double e = q_d - q[ii];
      const double w = config.omega[i](e, t);
      const double integral = integrals[i].next();
      if (std::abs(w) > config.c1[ii]) {
        throw AssumptionViolation(3, "omega_" + std::to_string(i + 1), t, w, config.c1[ii]);
      }
      if (std::abs(integral) > config.c2[ii]) {
        throw AssumptionViolation(3, "integral omega_" + std::to_string(i + 1), t, integral,
                                  config.c2[ii]);
      }
      const double tilde = e - integral;
      // Backward difference needs one previous sample; the first step uses
      // the proportional part only.
      const double rate = n == 0 ? 0.0 : (tilde - prev_tilde[i]) / h;
      u[ii] = -config.gains.b[ii] * (rate + config.gains.rho[ii] * tilde);
      prev_tilde[i] = tilde;
      integrals[i].push(w);

      auto& tr = result.joints[i];
      tr.t.push_back(t);
      tr.x.push_back(q[ii]);
      tr.x_d.push_back(q_d);
      tr.x_e.push_back(e);
      tr.xe_tilde.push_back(tilde);
      tr.u.push_back(u[ii]);
    }
    if (!u.allFinite()) throw std::runtime_error("robot: non-finite control at t = " + std::to_string(t));
    if (n < N) config.plant.step_rk4(q, qdot, sign * u, t, h);
  }

  for (std::size_t i = 0; i < joints; ++i) {
    const auto ii = static_cast<Index>(i);
    auto& tr = result.joints[i];
    RobotJointReport rep;
    rep.radius = pss_bound_radius(config.gains.rho[ii], config.gains.epsilon, config.c1[ii], config.c2[ii]);
    rep.derivative_bound =
        pss_derivative_bound(config.gains.rho[ii], config.gains.epsilon, config.c1[ii], config.c2[ii]);
    tr.bound_radius = rep.radius;
    rep.entry_time = entry_time(tr, rep.radius);
    tr.entry_time = rep.entry_time;
    if (rep.entry_time) {
      for (std::size_t k = 1; k < tr.rows(); ++k) {
        if (tr.t[k] < *rep.entry_time) continue;
        rep.max_derivative_inside =
            std::max(rep.max_derivative_inside, std::abs(tr.x_e[k] - tr.x_e[k - 1]) / h);
      }
      rep.derivative_ok = rep.max_derivative_inside <= rep.derivative_bound * (1.0 + kDerivativeSlack);
    }
    result.reports.push_back(rep);
  }
  return result;
}

}  // namespace fogpss
