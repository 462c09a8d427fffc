#pragma once

#include <vector>

#include "vgmm/gaussian.hpp"
#include "vgmm/linalg.hpp"

namespace vgmm {

struct Component {
  double weight;
  Gaussian gaussian;
};

/// Weighted sum of Gaussians of a common dimension. Weights must be strictly
/// positive; whether they sum to one is checked by the operations that need
/// it, so unbalanced inputs are representable.
class MixtureModel {
 public:
  explicit MixtureModel(std::vector<Component> components);

  const std::vector<Component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  Eigen::Index dim() const { return components_.front().gaussian.dim(); }
  double mass() const;
  Vector weights() const;
  bool is_balanced(double tol = 1e-9) const;

 private:
  std::vector<Component> components_;
};

/// Throws InputError unless the mixture has unit mass within 1e-9.
void require_balanced(const MixtureModel& mu, const char* name);

/// Equality as distributions: components sorted by (mean, covariance),
/// duplicates within `tol` merged, weights compared within `tol`.
bool canonically_equal(const MixtureModel& a, const MixtureModel& b, double tol = 1e-9);

/// Distance, plan and cost of a component-level transport problem.
/// `objective` is the LP optimum; `distance` is its square root for
/// squared-cost constructions and the optimum itself for linear costs.
struct TransportResult {
  double distance = 0.0;
  double objective = 0.0;
  Matrix plan;
  Matrix cost;
};

/// cost(i, j) = W2(nu0_i, nu1_j)^2.
Matrix w2_squared_cost(const MixtureModel& mu0, const MixtureModel& mu1);

/// Mixture distance: square root of the optimal transport cost between the
/// component weights under the squared-W2 cost.
TransportResult gmm_distance(const MixtureModel& mu0, const MixtureModel& mu1);

/// Displacement interpolation along the optimal plan: one component
/// (plan(i,j), gaussian_interpolate(nu0_i, nu1_j, t)) per nonzero plan entry.
MixtureModel gmm_interpolate(const MixtureModel& mu0, const MixtureModel& mu1, double t);

/// Same interpolation for a caller-provided plan.
MixtureModel gmm_interpolate_with_plan(const MixtureModel& mu0, const MixtureModel& mu1,
                                       const Matrix& plan, double t);

}  // namespace vgmm
