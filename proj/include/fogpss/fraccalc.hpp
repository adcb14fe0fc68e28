#pragma once

// Fractional-calculus kernel: gamma function, Riemann-Liouville integral and
// Caputo derivative of uniformly sampled signals, Mittag-Leffler series.
//
// Every operator uses lower terminal t0 and is defined as 0 at t0, where the
// defining integral is empty. Templated on the scalar so that the same code
// runs in double and long double.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fogpss {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Order of a fractional operator. Operators need alpha > 0; controllers
/// further restrict to (0, 1).
struct FracOrder {
  double alpha;

  explicit FracOrder(double a) : alpha(a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("fractional order must be finite and > 0, got " +
                                  std::to_string(a));
    }
  }
};

/// Uniformly sampled scalar time series; sample k lives at t0 + k*h.
template <typename Scalar = double>
class SampledSignal {
 public:
  SampledSignal(Scalar t0, Scalar h, Vector<Scalar> values)
      : t0_(t0), h_(h), values_(std::move(values)) {
    if (!(h_ > Scalar(0)) || !std::isfinite(static_cast<double>(h_))) {
      throw std::invalid_argument("sampled signal: step must be finite and > 0");
    }
    if (values_.size() == 0) {
      throw std::invalid_argument("sampled signal: no samples");
    }
    if (!values_.allFinite()) {
      throw std::invalid_argument("sampled signal: non-finite sample");
    }
  }

  /// Samples fn(t) at t0 + k*h for k = 0..count-1.
  template <typename Fn>
  static SampledSignal sample(Scalar t0, Scalar h, Index count, Fn&& fn) {
    Vector<Scalar> v(count);
    for (Index k = 0; k < count; ++k) v[k] = fn(t0 + Scalar(k) * h);
    return SampledSignal(t0, h, std::move(v));
  }

  Scalar t0() const { return t0_; }
  Scalar step() const { return h_; }
  Index size() const { return values_.size(); }
  Scalar time(Index k) const { return t0_ + Scalar(k) * h_; }
  Scalar operator[](Index k) const { return values_[k]; }
  const Vector<Scalar>& values() const { return values_; }

  /// Same grid, new values.
  SampledSignal with_values(Vector<Scalar> v) const { return SampledSignal(t0_, h_, std::move(v)); }

 private:
  Scalar t0_;
  Scalar h_;
  Vector<Scalar> values_;
};

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

template <typename Scalar>
Scalar lanczos_sum(Scalar z) {
  Scalar a = Scalar(kLanczos[0]);
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += Scalar(kLanczos[i]) / (z + Scalar(i));
  return a;
}

template <typename Scalar>
bool is_nonpositive_integer(Scalar s) {
  return s <= Scalar(0) && s == std::floor(s);
}

}  // namespace detail

/// Euler gamma function. Throws std::domain_error at the poles 0, -1, -2, ...
/// and std::overflow_error when the result is not representable.
template <typename Scalar = double>
Scalar gamma(Scalar s) {
  using std::cos;
  using std::exp;
  using std::pow;
  using std::sin;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!std::isfinite(static_cast<double>(s))) {
    throw std::domain_error("gamma: non-finite argument");
  }
  if (detail::is_nonpositive_integer(s)) {
    throw std::domain_error("gamma: pole at s = " + std::to_string(static_cast<double>(s)));
  }
  if (s < Scalar(0.5)) {
    // Reflection: gamma(s) gamma(1 - s) = pi / sin(pi s).
    return pi / (sin(pi * s) * gamma<Scalar>(Scalar(1) - s));
  }
  const Scalar z = s - Scalar(1);
  const Scalar t = z + Scalar(detail::kLanczosG) + Scalar(0.5);
  // t^(z+1/2) split in two halves so that the intermediate stays in range.
  const Scalar half = pow(t, (z + Scalar(0.5)) / Scalar(2));
  const Scalar result = sqrt(Scalar(2) * pi) * half * (half * exp(-t)) * detail::lanczos_sum(z);
  if (!std::isfinite(static_cast<double>(result))) {
    throw std::overflow_error("gamma: result overflows at s = " +
                              std::to_string(static_cast<double>(s)));
  }
  return result;
}

/// log|gamma(s)| for s > 0, same Lanczos sum.
template <typename Scalar = double>
Scalar log_gamma(Scalar s) {
  using std::log;
  if (!(s > Scalar(0))) throw std::domain_error("log_gamma: requires s > 0");
  if (s < Scalar(0.5)) return log(gamma<Scalar>(s));
  const Scalar z = s - Scalar(1);
  const Scalar t = z + Scalar(detail::kLanczosG) + Scalar(0.5);
  return Scalar(0.5) * log(Scalar(2) * std::numbers::pi_v<Scalar>) + (z + Scalar(0.5)) * log(t) - t +
         log(detail::lanczos_sum(z));
}

/// Mittag-Leffler function E_alpha(z) by its power series, restricted to
/// |z| <= 5. Summation stops once a term drops below 1e-14 in magnitude.
/// For small alpha and negative z the terms can dwarf the sum; a
/// std::domain_error is raised when cancellation would cost more than about
/// eight significant digits.
template <typename Scalar = double>
Scalar mittag_leffler(Scalar alpha, Scalar z) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::pow;
  if (!(alpha > Scalar(0))) throw std::invalid_argument("mittag_leffler: alpha must be > 0");
  if (!(abs(z) <= Scalar(5))) {
    throw std::domain_error("mittag_leffler: |z| <= 5 required for the series, got z = " +
                            std::to_string(static_cast<double>(z)));
  }
  constexpr int kMaxTerms = 20000;
  const Scalar tol = Scalar(1e-14);
  Scalar sum = Scalar(1);
  if (z == Scalar(0)) return sum;
  const Scalar log_abs_z = log(abs(z));
  Scalar peak = Scalar(1);
  for (int k = 1; k < kMaxTerms; ++k) {
    const Scalar arg = alpha * Scalar(k) + Scalar(1);
    Scalar term;
    if (arg < Scalar(150)) {
      term = pow(z, Scalar(k)) / gamma<Scalar>(arg);
    } else {
      term = exp(Scalar(k) * log_abs_z - log_gamma<Scalar>(arg));
      if (z < Scalar(0) && (k % 2) == 1) term = -term;
    }
    sum += term;
    peak = std::max(peak, abs(term));
    if (!std::isfinite(static_cast<double>(sum))) {
      throw std::overflow_error("mittag_leffler: series overflows");
    }
    // Terms grow before they decay when alpha * k is small; only stop once
    // the Gamma growth has taken over.
    if (abs(term) < tol && arg > Scalar(2)) {
      if (peak > Scalar(1e8) * abs(sum)) {
        throw std::domain_error("mittag_leffler: series too ill-conditioned at z = " +
                                std::to_string(static_cast<double>(z)));
      }
      return sum;
    }
  }
  throw std::runtime_error("mittag_leffler: series did not converge");
}

/// Left-rectangle product-quadrature weight for the RL kernel:
/// integral of (t_n - tau)^(alpha-1)/Gamma(alpha) over one cell, in units of
/// h^alpha / Gamma(alpha+1). m = n - j >= 1.
template <typename Scalar>
Scalar rl_cell_weight(Index m, Scalar alpha) {
  using std::pow;
  return pow(Scalar(m), alpha) - pow(Scalar(m - 1), alpha);
}

/// Riemann-Liouville fractional integral (I^alpha f)(t_k) at every grid
/// point by product-rectangle quadrature. O(h) accurate; exact for constants.
template <typename Scalar>
SampledSignal<Scalar> rl_integral(const SampledSignal<Scalar>& f, FracOrder order) {
  using std::pow;
  const Scalar alpha = Scalar(order.alpha);
  const Index n = f.size();
  Vector<Scalar> w(n);
  for (Index m = 1; m < n; ++m) w[m] = rl_cell_weight<Scalar>(m, alpha);
  const Scalar scale = pow(f.step(), alpha) / gamma<Scalar>(alpha + Scalar(1));
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  const auto& v = f.values();
  for (Index k = 1; k < n; ++k) {
    Scalar acc = 0;
    for (Index j = 0; j < k; ++j) acc += v[j] * w[k - j];
    out[k] = scale * acc;
  }
  return f.with_values(std::move(out));
}

/// L1 weight (j+1)^(1-alpha) - j^(1-alpha).
template <typename Scalar>
Scalar l1_weight(Index j, Scalar alpha) {
  using std::pow;
  return pow(Scalar(j + 1), Scalar(1) - alpha) - pow(Scalar(j), Scalar(1) - alpha);
}

/// h^-alpha / Gamma(2 - alpha), the L1 prefactor.
template <typename Scalar>
Scalar l1_scale(Scalar h, Scalar alpha) {
  using std::pow;
  return pow(h, -alpha) / gamma<Scalar>(Scalar(2) - alpha);
}

namespace detail {
inline void require_unit_order(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": order must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
}
}  // namespace detail

/// Caputo derivative at the last sample only, L1 scheme. Needs >= 1 sample;
/// a single sample gives 0.
template <typename Derived>
typename Derived::Scalar caputo_l1_last(const Eigen::MatrixBase<Derived>& v,
                                        typename Derived::Scalar h, FracOrder order) {
  using Scalar = typename Derived::Scalar;
  detail::require_unit_order(order.alpha, "caputo_l1_last");
  const Scalar alpha = Scalar(order.alpha);
  const Index n = v.size() - 1;
  if (n < 1) return Scalar(0);
  Scalar acc = 0;
  for (Index j = 0; j < n; ++j) acc += l1_weight<Scalar>(j, alpha) * (v[n - j] - v[n - j - 1]);
  return l1_scale(h, alpha) * acc;
}

/// Caputo derivative (^C D^alpha f)(t_k) on the grid, L1 scheme,
/// O(h^(2-alpha)). alpha in (0, 1); at least two samples.
template <typename Scalar>
SampledSignal<Scalar> caputo_derivative(const SampledSignal<Scalar>& f, FracOrder order) {
  detail::require_unit_order(order.alpha, "caputo_derivative");
  if (f.size() < 2) throw std::invalid_argument("caputo_derivative: need >= 2 samples");
  const Scalar alpha = Scalar(order.alpha);
  const Index n = f.size();
  Vector<Scalar> w(n);
  for (Index j = 0; j < n; ++j) w[j] = l1_weight<Scalar>(j, alpha);
  const auto& v = f.values();
  Vector<Scalar> diff(n);
  diff[0] = 0;
  for (Index k = 1; k < n; ++k) diff[k] = v[k] - v[k - 1];
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  const Scalar scale = l1_scale(f.step(), alpha);
  for (Index k = 1; k < n; ++k) {
    Scalar acc = 0;
    for (Index j = 0; j < k; ++j) acc += w[j] * diff[k - j];
    out[k] = scale * acc;
  }
  return f.with_values(std::move(out));
}

/// Incremental L1 Caputo evaluation for a signal that grows one sample at a
/// time. The history sum for the next node is formed once; the newest-sample
/// term is then cheap to evaluate for any number of candidate values.
class CaputoL1Stepper {
 public:
  CaputoL1Stepper(double h, FracOrder order, Index capacity)
      : alpha_(order.alpha), scale_(0.0), weights_(capacity + 1), values_() {
    detail::require_unit_order(order.alpha, "CaputoL1Stepper");
    scale_ = l1_scale(h, alpha_);
    for (Index j = 0; j <= capacity; ++j) weights_[j] = l1_weight(j, alpha_);
    values_.reserve(static_cast<std::size_t>(capacity + 1));
  }

  /// Appends a committed sample and prepares the history sum for the next one.
  void push(double value) {
    values_.push_back(value);
    const Index n = static_cast<Index>(values_.size());  // index of the next node
    if (n >= weights_.size()) throw std::out_of_range("CaputoL1Stepper: capacity exceeded");
    double acc = 0.0;
    for (Index j = 1; j < n; ++j) {
      acc += weights_[j] * (values_[static_cast<std::size_t>(n - j)] -
                            values_[static_cast<std::size_t>(n - j - 1)]);
    }
    memory_ = acc;
  }

  /// Derivative at the next node if its sample were `candidate`.
  double next(double candidate) const {
    if (values_.empty()) return 0.0;
    return scale_ * (weights_[0] * (candidate - values_.back()) + memory_);
  }

  std::size_t size() const { return values_.size(); }

 private:
  double alpha_;
  double scale_;
  Vector<double> weights_;
  std::vector<double> values_;
  double memory_ = 0.0;
};

/// Incremental left-rectangle RL integral; the value at the next node only
/// depends on committed samples.
class RlIntegralStepper {
 public:
  RlIntegralStepper(double h, FracOrder order, Index capacity)
      : scale_(std::pow(h, order.alpha) / gamma(order.alpha + 1.0)), weights_(capacity + 1) {
    weights_[0] = 0.0;
    for (Index m = 1; m <= capacity; ++m) weights_[m] = rl_cell_weight(m, order.alpha);
    values_.reserve(static_cast<std::size_t>(capacity + 1));
  }

  void push(double value) { values_.push_back(value); }

  /// (I^alpha f) at the node following the last pushed sample; 0 when empty.
  double next() const {
    const Index n = static_cast<Index>(values_.size());
    if (n >= weights_.size()) throw std::out_of_range("RlIntegralStepper: capacity exceeded");
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += values_[static_cast<std::size_t>(j)] * weights_[n - j];
    return scale_ * acc;
  }

 private:
  double scale_;
  Vector<double> weights_;
  std::vector<double> values_;
};

// Closed forms used by tests and audits.

/// I^alpha t^p = Gamma(p+1)/Gamma(p+1+alpha) t^(p+alpha).
template <typename Scalar>
Scalar rl_integral_of_power(Scalar p, Scalar alpha, Scalar t) {
  using std::pow;
  return gamma<Scalar>(p + Scalar(1)) / gamma<Scalar>(p + Scalar(1) + alpha) * pow(t, p + alpha);
}

/// ^C D^alpha t^p = Gamma(p+1)/Gamma(p+1-alpha) t^(p-alpha), p > 0.
template <typename Scalar>
Scalar caputo_of_power(Scalar p, Scalar alpha, Scalar t) {
  using std::pow;
  return gamma<Scalar>(p + Scalar(1)) / gamma<Scalar>(p + Scalar(1) - alpha) * pow(t, p - alpha);
}

}  // namespace fogpss
