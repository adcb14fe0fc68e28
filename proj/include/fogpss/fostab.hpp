#pragma once

// Stability utilities for fractional-order systems.

#include "fogpss/fraccalc.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fogpss {

/// ^C D^alpha x = A x with alpha in (0, 1].
struct LinearFoSystem {
  Eigen::MatrixXd A;
  double alpha;

  LinearFoSystem(Eigen::MatrixXd a, double order);
};

struct StabilityVerdict {
  bool stable = false;
  /// min_i |arg(lambda_i)| - alpha*pi/2, radians.
  double margin = 0.0;
  std::vector<double> eigen_args;
  Eigen::VectorXcd eigenvalues;
};

/// Eigenvalue-argument test: asymptotically stable iff every eigenvalue of A
/// satisfies |arg(lambda)| > alpha*pi/2 (strict). A zero eigenvalue counts
/// as argument 0. Throws std::runtime_error if the eigen solver fails.
StabilityVerdict check_linear_fo_stability(const LinearFoSystem& system);

struct Lemma1Audit {
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Observed L1 power-function error constant (sup over alpha in (0,1) of
/// max error / (h^(2-alpha) max|f''|) for f = t^2) and the audit multiple.
inline constexpr double kL1ErrorConstant = 0.5;
inline constexpr double kLemma1ToleranceFactor = 10.0 * kL1ErrorConstant;

/// Discrete audit of the fractional Lyapunov inequality
///   1/2 D^alpha (x^2) <= x D^alpha x
/// on a sampled, differentiable signal. Reports the largest excess of the
/// left side over the right side against a tolerance scaled by
/// h^(2-alpha) and a second-difference roughness estimate.
Lemma1Audit audit_lemma1(const SampledSignal<double>& signal, double alpha);

}  // namespace fogpss
