#pragma once

#include <vector>

#include "vgmm/gmm_ot.hpp"
#include "vgmm/vector_gmm_ot.hpp"

namespace vgmm {

/// Which side received the implicit source node carrying the mass deficit.
enum class SourceSide {
  none,    // masses already equal
  start,   // extra row: the start side was lighter
  target,  // extra column: the target side was lighter
};

/// Transport problem augmented with one source node on the lighter side. The
/// plan and cost carry the extra row or column (last index) when side is not
/// `none`. Costs use the squared convention, so distance = sqrt(objective).
struct UnbalancedResult {
  TransportResult transport;
  SourceSide side = SourceSide::none;
  double deficit = 0.0;  // |mass0 - mass1|
};

/// Scalar mixtures of arbitrary positive mass; moving a unit of mass to or
/// from the source costs `gamma`.
UnbalancedResult unbalanced_gmm_distance(const MixtureModel& mu0, const MixtureModel& mu1, double gamma);

/// Original-layer mixture at time t plus the source-layer components (empty
/// when no mass is created or destroyed).
struct UnbalancedSnapshot {
  std::vector<Component> original;
  std::vector<Component> source;

  double original_mass() const;
  double source_mass() const;
};

/// Builds the explicit two-layer problem (source-layer Gaussians copy the
/// shape of their plan partners), interpolates it and splits the result by
/// layer.
UnbalancedSnapshot unbalanced_gmm_interpolate(const MixtureModel& mu0, const MixtureModel& mu1, double gamma,
                                              double t);

/// Vector mixtures of arbitrary positive mass. The original block uses the
/// squared graph cost with `gamma`; the source node is priced at
/// `gamma_source` per unit mass.
UnbalancedResult unbalanced_vgmm_distance(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                          double gamma, double gamma_source);

/// Interpolant on the graph extended with a source channel (index
/// `source_channel`, adjacent to every original channel).
struct UnbalancedInterpolant {
  VectorInterpolant state;
  int source_channel;

  /// Mass per original channel (the source channel is dropped).
  Vector original_channel_masses() const;
  double original_mass() const;
  double source_mass() const;
};

UnbalancedInterpolant unbalanced_vgmm_interpolate(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                                  double gamma, double gamma_source, double t);

/// Graph with one extra node joined to every original node by a unit edge.
ChannelGraph with_source_channel(const ChannelGraph& g);

}  // namespace vgmm
