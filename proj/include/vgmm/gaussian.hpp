#pragma once

#include "vgmm/linalg.hpp"

namespace vgmm {

/// Multivariate normal distribution with an SPD covariance. Construction
/// validates shapes, symmetry and strict positive definiteness.
class Gaussian {
 public:
  Gaussian(Vector mean, Matrix covariance);

  /// 1D convenience constructor taking the variance (not the std deviation).
  static Gaussian scalar(double mean, double variance);

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  Matrix cov_;
};

/// Mean and covariance entrywise within `tol`.
bool approx_equal(const Gaussian& a, const Gaussian& b, double tol = 1e-9);

/// Strict weak order on (mean, covariance), used to canonicalize mixtures.
bool lexicographic_less(const Gaussian& a, const Gaussian& b);

/// Squared Wasserstein-2 distance:
///   |m0 - m1|^2 + tr(S0 + S1 - 2 (S0^1/2 S1 S0^1/2)^1/2).
/// Exactly symmetric in its arguments and exactly zero for Gaussians that
/// agree entrywise within 1e-9.
double w2_squared_gaussian(const Gaussian& g0, const Gaussian& g1);

/// Wasserstein-2 distance, the square root of w2_squared_gaussian.
double w2_gaussian(const Gaussian& g0, const Gaussian& g1);

/// Point at time t on the W2 geodesic from g0 to g1. Endpoints return the
/// inputs unchanged; t outside [0, 1] is rejected.
Gaussian gaussian_interpolate(const Gaussian& g0, const Gaussian& g1, double t);

/// Probability density of `g` at `x`.
double density(const Gaussian& g, const Vector& x);

}  // namespace vgmm
