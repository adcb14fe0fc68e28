#include "fogpss/fostab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fogpss {

LinearFoSystem::LinearFoSystem(Eigen::MatrixXd a, double order) : A(std::move(a)), alpha(order) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw std::invalid_argument("linear FO system: A must be square and non-empty");
  }
  if (!A.allFinite()) throw std::invalid_argument("linear FO system: non-finite entry in A");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("linear FO system: alpha must lie in (0, 1], got " +
                                std::to_string(alpha));
  }
}

StabilityVerdict check_linear_fo_stability(const LinearFoSystem& system) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(system.A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("check_linear_fo_stability: eigenvalue computation did not converge");
  }
  StabilityVerdict v;
  v.eigenvalues = solver.eigenvalues();
  const double sector = system.alpha * std::numbers::pi / 2.0;
  double min_arg = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.eigenvalues.size(); ++i) {
    const auto lambda = v.eigenvalues[i];
    const double arg = (lambda == std::complex<double>(0.0, 0.0)) ? 0.0 : std::abs(std::arg(lambda));
    v.eigen_args.push_back(arg);
    min_arg = std::min(min_arg, arg);
  }
  v.margin = min_arg - sector;
  v.stable = v.margin > 0.0;
  return v;
}

Lemma1Audit audit_lemma1(const SampledSignal<double>& signal, double alpha) {
  detail::require_unit_order(alpha, "audit_lemma1");
  if (signal.size() < 3) throw std::invalid_argument("audit_lemma1: need >= 3 samples");
  const FracOrder order(alpha);
  const auto& x = signal.values();
  const Vector<double> x2 = x.array().square();
  const auto lhs = caputo_derivative(signal.with_values(x2), order);
  const auto dx = caputo_derivative(signal, order);

  Lemma1Audit report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  double magnitude = 1.0;
  for (Index k = 0; k < signal.size(); ++k) {
    const double l = 0.5 * lhs[k];
    const double r = x[k] * dx[k];
    report.max_violation = std::max(report.max_violation, l - r);
    magnitude = std::max({magnitude, std::abs(l), std::abs(r)});
  }

  const double h = signal.step();
  auto max_second_difference = [h](const Vector<double>& v) {
    double m = 0.0;
    for (Index k = 1; k + 1 < v.size(); ++k) {
      m = std::max(m, std::abs(v[k + 1] - 2.0 * v[k] + v[k - 1]) / (h * h));
    }
    return m;
  };
  const double roughness =
      max_second_difference(x2) + 2.0 * x.cwiseAbs().maxCoeff() * max_second_difference(x);
  report.tolerance = kLemma1ToleranceFactor * std::pow(h, 2.0 - alpha) * roughness +
                     64.0 * std::numeric_limits<double>::epsilon() * magnitude;
  report.pass = report.max_violation <= report.tolerance;
  return report;
}

}  // namespace fogpss
