#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vgmm/gmm_ot.hpp"

namespace vgmm {

/// Points (one per row) with nonnegative weights.
struct WeightedSamples {
  Matrix points;
  Vector weights;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  double total_weight() const { return weights.sum(); }
};

/// Throws InputError on shape mismatch, negative weights or zero total mass.
void validate(const WeightedSamples& data);

struct EmOptions {
  int max_iter = 200;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  /// Lower bound on covariance eigenvalues. Defaults to 1e-6 * range^2 with
  /// range the largest coordinate extent of the data.
  std::optional<double> jitter;
};

struct EmFit {
  MixtureModel model;                  // weights sum to 1
  std::vector<double> log_likelihood;  // initial value, then one per iteration
  int iterations = 0;
  bool converged = false;
};

/// Weighted maximum-likelihood fit of a k-component mixture. Seeding is
/// weighted k-means++ driven by `seed`. The M-step maximizes over
/// covariances whose eigenvalues are at least the jitter, which keeps the
/// weighted log-likelihood monotone.
EmFit fit_gmm_em(const WeightedSamples& data, int k, const EmOptions& opts = {});

/// sum_i w_i log sum_k pi_k N(x_i; m_k, S_k).
double weighted_log_likelihood(const WeightedSamples& data, const MixtureModel& model);

/// Posterior component probabilities, one row per sample (rows sum to 1).
Matrix responsibilities(const WeightedSamples& data, const MixtureModel& model);

/// Default jitter for `data`.
double default_jitter(const WeightedSamples& data);

}  // namespace vgmm
