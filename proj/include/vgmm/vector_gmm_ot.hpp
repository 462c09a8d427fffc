#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "vgmm/channel_graph.hpp"
#include "vgmm/gaussian.hpp"
#include "vgmm/gmm_ot.hpp"
#include "vgmm/transport.hpp"

namespace vgmm {

using GraphPtr = std::shared_ptr<const ChannelGraph>;

struct VectorComponent {
  double weight;
  Gaussian gaussian;
  int channel;
};

/// Gaussians distributed over the channels of a graph. Weights must be
/// positive; unit total mass is required only by balanced operations.
class VectorMixtureModel {
 public:
  VectorMixtureModel(GraphPtr graph, std::vector<VectorComponent> components);

  const ChannelGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  const std::vector<VectorComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  Eigen::Index dim() const { return components_.front().gaussian.dim(); }
  double mass() const;
  Vector weights() const;
  /// Total weight per channel.
  Vector channel_masses() const;

 private:
  GraphPtr graph_;
  std::vector<VectorComponent> components_;
};

struct PlacedComponent {
  double weight;
  Gaussian gaussian;
  GraphPosition position;
};

/// Vector mixture whose components may sit between channels. This is what
/// displacement interpolation produces; a VectorMixtureModel converts to one
/// with every component on a pure node.
class VectorInterpolant {
 public:
  VectorInterpolant(GraphPtr graph, std::vector<PlacedComponent> components);
  static VectorInterpolant from_model(const VectorMixtureModel& model);

  const ChannelGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  const std::vector<PlacedComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  Eigen::Index dim() const { return components_.front().gaussian.dim(); }
  double mass() const;
  Vector weights() const;
  /// Sum over components of weight * delta_vector(position).
  Vector channel_masses() const;

 private:
  GraphPtr graph_;
  std::vector<PlacedComponent> components_;
};

enum class Approach {
  restricted = 0,  // couplings limited to equal or adjacent channels, squared W2 cost
  additive = 1,    // W2 + gamma * graph distance, linear objective
  squared = 2,     // W2^2 + gamma * graph distance^2, square-rooted objective
};

/// Parses "0", "1" or "2".
Approach parse_approach(int value);

/// c1(i, j) = W2(nu0_i, nu1_j) + gamma * d(q0_i, q1_j), with d the metric-graph
/// distance between component positions.
Matrix cost_matrix_v1(const VectorInterpolant& rho0, const VectorInterpolant& rho1, double gamma);
Matrix cost_matrix_v1(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1, double gamma);

/// c2(i, j) = W2(nu0_i, nu1_j)^2 + gamma * d(q0_i, q1_j)^2.
Matrix cost_matrix_v2(const VectorInterpolant& rho0, const VectorInterpolant& rho1, double gamma);
Matrix cost_matrix_v2(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1, double gamma);

/// Cells allowed by the restricted approach: every channel touched by one
/// component must equal or neighbour every channel touched by the other.
Mask restriction_mask(const VectorInterpolant& rho0, const VectorInterpolant& rho1);

/// Balanced vector distance. Returns nullopt only for the restricted approach
/// when no admissible coupling exists.
std::optional<TransportResult> vgmm_distance(const VectorInterpolant& rho0, const VectorInterpolant& rho1,
                                             double gamma, Approach approach);
std::optional<TransportResult> vgmm_distance(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                             double gamma, Approach approach);

/// Displacement interpolation. Approaches 1 and 2 move each plan entry along
/// the chosen shortest path between its channels; approach 0 blends the two
/// channels directly. Throws InfeasibleError if approach 0 has no coupling.
VectorInterpolant vgmm_interpolate(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                   double t, double gamma, Approach approach);

/// Interpolation for a caller-provided plan.
VectorInterpolant vgmm_interpolate_with_plan(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                             const Matrix& plan, double t, Approach approach);

/// Equality as vector distributions: components sorted by (channel, mean,
/// covariance), duplicates merged, weights compared within `tol`.
bool canonically_equal(const VectorMixtureModel& a, const VectorMixtureModel& b, double tol = 1e-9);

}  // namespace vgmm
