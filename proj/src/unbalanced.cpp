#include "vgmm/unbalanced.hpp"

#include <cmath>
#include <sstream>

#include "vgmm/errors.hpp"
#include "vgmm/transport.hpp"

namespace vgmm {

namespace {

constexpr double kEqualMassRel = 1e-12;

void require_price(double gamma, const char* name) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << name << " must be finite and >= 0, got " << gamma;
    throw InputError(os.str());
  }
}

// Appends the source row or column priced at `price` and solves.
UnbalancedResult solve_with_source(const Matrix& block, const Vector& w0, const Vector& w1, double price) {
  const double m0 = w0.sum(), m1 = w1.sum();
  if (!(m0 > 0.0) || !(m1 > 0.0)) throw InputError("unbalanced transport needs positive mass on both sides");

  UnbalancedResult out;
  out.deficit = std::abs(m0 - m1);
  Matrix cost = block;
  Vector p0 = w0, p1 = w1;
  if (out.deficit <= kEqualMassRel * std::max(m0, m1)) {
    out.side = SourceSide::none;
    out.deficit = 0.0;
    // Tiny residual mismatch: scale the target to the start mass exactly.
    p1 *= m0 / m1;
  } else if (m0 > m1) {
    out.side = SourceSide::target;
    cost.conservativeResize(block.rows(), block.cols() + 1);
    cost.col(block.cols()).setConstant(price);
    p1.conservativeResize(w1.size() + 1);
    p1(w1.size()) = m0 - m1;
  } else {
    out.side = SourceSide::start;
    cost.conservativeResize(block.rows() + 1, block.cols());
    cost.row(block.rows()).setConstant(price);
    p0.conservativeResize(w0.size() + 1);
    p0(w0.size()) = m1 - m0;
  }
  TransportSolution sol = solve_transport(cost, p0, p1);
  out.transport.cost = std::move(cost);
  out.transport.objective = sol.value;
  out.transport.distance = std::sqrt(std::max(0.0, sol.value));
  out.transport.plan = std::move(sol.coupling.plan);
  return out;
}

// Explicit extended models and the plan between them: every source-node
// entry of the plan becomes a copy of its partner's Gaussian on
// `source_channel`, weighted by that entry.
struct ExplicitProblem {
  std::vector<VectorComponent> start;
  std::vector<VectorComponent> target;
  Matrix plan;
};

ExplicitProblem make_explicit(const std::vector<VectorComponent>& start, const std::vector<VectorComponent>& target,
                              const UnbalancedResult& r, int source_channel) {
  ExplicitProblem out{start, target, {}};
  const Matrix& plan = r.transport.plan;
  const auto n0 = static_cast<Eigen::Index>(start.size());
  const auto n1 = static_cast<Eigen::Index>(target.size());
  if (r.side == SourceSide::none) {
    out.plan = plan;
    return out;
  }
  if (r.side == SourceSide::target) {
    std::vector<std::pair<Eigen::Index, double>> copies;
    for (Eigen::Index i = 0; i < n0; ++i)
      if (plan(i, n1) > 0.0) copies.emplace_back(i, plan(i, n1));
    out.plan = Matrix::Zero(n0, n1 + static_cast<Eigen::Index>(copies.size()));
    out.plan.leftCols(n1) = plan.leftCols(n1);
    for (std::size_t c = 0; c < copies.size(); ++c) {
      const auto [i, w] = copies[c];
      out.target.push_back({w, start[static_cast<std::size_t>(i)].gaussian, source_channel});
      out.plan(i, n1 + static_cast<Eigen::Index>(c)) = w;
    }
  } else {
    std::vector<std::pair<Eigen::Index, double>> copies;
    for (Eigen::Index j = 0; j < n1; ++j)
      if (plan(n0, j) > 0.0) copies.emplace_back(j, plan(n0, j));
    out.plan = Matrix::Zero(n0 + static_cast<Eigen::Index>(copies.size()), n1);
    out.plan.topRows(n0) = plan.topRows(n0);
    for (std::size_t c = 0; c < copies.size(); ++c) {
      const auto [j, w] = copies[c];
      out.start.push_back({w, target[static_cast<std::size_t>(j)].gaussian, source_channel});
      out.plan(n0 + static_cast<Eigen::Index>(c), j) = w;
    }
  }
  return out;
}

std::vector<VectorComponent> on_channel(const MixtureModel& mu, int channel) {
  std::vector<VectorComponent> out;
  for (const Component& c : mu.components()) out.push_back({c.weight, c.gaussian, channel});
  return out;
}


// Original-channel pairs follow shortest paths of the original graph (the
// source node must not act as a shortcut); pairs involving the source
// channel move along their direct edge.
VectorInterpolant interpolate_explicit(const ChannelGraph& original, const GraphPtr& extended,
                                       const ExplicitProblem& p, int source_channel, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "interpolation time " << t << " outside [0, 1]";
    throw InputError(os.str());
  }
  std::vector<PlacedComponent> out;
  for (Eigen::Index i = 0; i < p.plan.rows(); ++i) {
    const VectorComponent& a = p.start[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p.plan.cols(); ++j) {
      if (!(p.plan(i, j) > 0.0)) continue;
      const VectorComponent& b = p.target[static_cast<std::size_t>(j)];
      GraphPosition pos;
      if (a.channel == source_channel || b.channel == source_channel) {
        pos = GraphPosition::blend(a.channel, b.channel, t);
      } else {
        pos = path_interpolate(original, original.shortest_path(a.channel, b.channel).nodes, t);
      }
      out.push_back({p.plan(i, j), gaussian_interpolate(a.gaussian, b.gaussian, t), pos});
    }
  }
  return VectorInterpolant(extended, std::move(out));
}

}  // namespace

ChannelGraph with_source_channel(const ChannelGraph& g) {
  auto edges = g.edges();
  auto lengths = g.lengths();
  const int source = g.node_count();
  for (int u = 0; u < g.node_count(); ++u) {
    edges.emplace_back(u, source);
    lengths.push_back(1.0);
  }
  return ChannelGraph(g.node_count() + 1, std::move(edges), std::move(lengths));
}

double UnbalancedSnapshot::original_mass() const {
  double total = 0.0;
  for (const Component& c : original) total += c.weight;
  return total;
}

double UnbalancedSnapshot::source_mass() const {
  double total = 0.0;
  for (const Component& c : source) total += c.weight;
  return total;
}

UnbalancedResult unbalanced_gmm_distance(const MixtureModel& mu0, const MixtureModel& mu1, double gamma) {
  require_price(gamma, "gamma");
  return solve_with_source(w2_squared_cost(mu0, mu1), mu0.weights(), mu1.weights(), gamma);
}

UnbalancedSnapshot unbalanced_gmm_interpolate(const MixtureModel& mu0, const MixtureModel& mu1, double gamma,
                                              double t) {
  const UnbalancedResult r = unbalanced_gmm_distance(mu0, mu1, gamma);
  // Two layers: 0 = original, 1 = source.
  const ChannelGraph original = ChannelGraph::single();
  auto graph = std::make_shared<const ChannelGraph>(with_source_channel(original));
  const ExplicitProblem p = make_explicit(on_channel(mu0, 0), on_channel(mu1, 0), r, 1);
  const VectorInterpolant state = interpolate_explicit(original, graph, p, 1, t);

  UnbalancedSnapshot out;
  for (const PlacedComponent& c : state.components()) {
    const Vector share = delta_vector(c.position, 2);
    if (share(0) > 0.0) out.original.push_back({c.weight * share(0), c.gaussian});
    if (share(1) > 0.0) out.source.push_back({c.weight * share(1), c.gaussian});
  }
  return out;
}

UnbalancedResult unbalanced_vgmm_distance(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                          double gamma, double gamma_source) {
  require_price(gamma_source, "gamma_source");
  const Matrix block = cost_matrix_v2(rho0, rho1, gamma);
  return solve_with_source(block, rho0.weights(), rho1.weights(), gamma_source);
}

Vector UnbalancedInterpolant::original_channel_masses() const {
  return state.channel_masses().head(source_channel);
}

double UnbalancedInterpolant::original_mass() const { return original_channel_masses().sum(); }

double UnbalancedInterpolant::source_mass() const { return state.channel_masses()(source_channel); }

UnbalancedInterpolant unbalanced_vgmm_interpolate(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                                  double gamma, double gamma_source, double t) {
  const UnbalancedResult r = unbalanced_vgmm_distance(rho0, rho1, gamma, gamma_source);
  const int source = rho0.graph().node_count();
  auto graph = std::make_shared<const ChannelGraph>(with_source_channel(rho0.graph()));
  const ExplicitProblem p = make_explicit(rho0.components(), rho1.components(), r, source);
  return {interpolate_explicit(rho0.graph(), graph, p, source, t), source};
}

}  // namespace vgmm
