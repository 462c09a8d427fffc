#include "vgmm/vector_gmm_ot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

void require_graph(const GraphPtr& g) {
  if (!g) throw InputError("vector mixture requires a channel graph");
}

template <typename Items>
void require_common_dim(const Items& items) {
  if (items.empty()) throw InputError("vector mixture must have at least one component");
  const Eigen::Index n = items.front().gaussian.dim();
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!(items[k].weight > 0.0) || !std::isfinite(items[k].weight)) {
      std::ostringstream os;
      os << "component " << k << " has non-positive weight " << items[k].weight;
      throw InputError(os.str());
    }
    if (items[k].gaussian.dim() != n) {
      std::ostringstream os;
      os << "component " << k << " has dimension " << items[k].gaussian.dim() << ", expected " << n;
      throw InputError(os.str());
    }
  }
}

void require_compatible(const VectorInterpolant& a, const VectorInterpolant& b) {
  if (!(a.graph() == b.graph())) throw InputError("vector mixtures are defined on different channel graphs");
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "vector mixture dimensions differ: " << a.dim() << " vs " << b.dim();
    throw InputError(os.str());
  }
}

void require_balanced(const VectorInterpolant& rho, const char* name) {
  if (std::abs(rho.mass() - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << name << " has total mass " << rho.mass()
       << "; balanced transport needs mass 1 (use the unbalanced variant)";
    throw InputError(os.str());
  }
}

void require_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    std::ostringstream os;
    os << "gamma must be finite and >= 0, got " << gamma;
    throw InputError(os.str());
  }
}

template <typename Term>
Matrix fill_cost(const VectorInterpolant& rho0, const VectorInterpolant& rho1, Term term) {
  require_compatible(rho0, rho1);
  Matrix cost(static_cast<Eigen::Index>(rho0.size()), static_cast<Eigen::Index>(rho1.size()));
  for (std::size_t i = 0; i < rho0.size(); ++i)
    for (std::size_t j = 0; j < rho1.size(); ++j)
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          term(rho0.components()[i], rho1.components()[j]);
  return cost;
}

std::vector<int> support(const GraphPosition& p) {
  if (p.is_node()) return {p.node_a};
  return {p.node_a, p.node_b};
}

}  // namespace

VectorMixtureModel::VectorMixtureModel(GraphPtr graph, std::vector<VectorComponent> components)
    : graph_(std::move(graph)), components_(std::move(components)) {
  require_graph(graph_);
  require_common_dim(components_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const int q = components_[k].channel;
    if (q < 0 || q >= graph_->node_count()) {
      std::ostringstream os;
      os << "component " << k << " has channel " << q << " outside 0.." << graph_->node_count() - 1;
      throw InputError(os.str());
    }
  }
}

double VectorMixtureModel::mass() const { return weights().sum(); }

Vector VectorMixtureModel::weights() const {
  Vector w(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) w(static_cast<Eigen::Index>(k)) = components_[k].weight;
  return w;
}

Vector VectorMixtureModel::channel_masses() const {
  Vector out = Vector::Zero(graph_->node_count());
  for (const VectorComponent& c : components_) out(c.channel) += c.weight;
  return out;
}

VectorInterpolant::VectorInterpolant(GraphPtr graph, std::vector<PlacedComponent> components)
    : graph_(std::move(graph)), components_(std::move(components)) {
  require_graph(graph_);
  require_common_dim(components_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const GraphPosition& p = components_[k].position;
    const int m = graph_->node_count();
    if (p.node_a < 0 || p.node_b < 0 || p.node_a >= m || p.node_b >= m || !(p.fraction >= 0.0) ||
        !(p.fraction <= 1.0) || (p.is_node() && p.fraction != 0.0)) {
      std::ostringstream os;
      os << "component " << k << " has invalid position (" << p.node_a << ", " << p.node_b << ", "
         << p.fraction << ")";
      throw InputError(os.str());
    }
  }
}

VectorInterpolant VectorInterpolant::from_model(const VectorMixtureModel& model) {
  std::vector<PlacedComponent> out;
  out.reserve(model.size());
  for (const VectorComponent& c : model.components())
    out.push_back({c.weight, c.gaussian, GraphPosition::node(c.channel)});
  return VectorInterpolant(model.graph_ptr(), std::move(out));
}

double VectorInterpolant::mass() const { return weights().sum(); }

Vector VectorInterpolant::weights() const {
  Vector w(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) w(static_cast<Eigen::Index>(k)) = components_[k].weight;
  return w;
}

Vector VectorInterpolant::channel_masses() const {
  Vector out = Vector::Zero(graph_->node_count());
  for (const PlacedComponent& c : components_) out += c.weight * delta_vector(c.position, graph_->node_count());
  return out;
}

Approach parse_approach(int value) {
  switch (value) {
    case 0:
      return Approach::restricted;
    case 1:
      return Approach::additive;
    case 2:
      return Approach::squared;
    default:
      throw InputError("approach must be 0, 1 or 2, got " + std::to_string(value));
  }
}

Matrix cost_matrix_v1(const VectorInterpolant& rho0, const VectorInterpolant& rho1, double gamma) {
  require_gamma(gamma);
  const ChannelGraph& g = rho0.graph();
  return fill_cost(rho0, rho1, [&](const PlacedComponent& a, const PlacedComponent& b) {
    const double graph_term = gamma == 0.0 ? 0.0 : gamma * position_distance(g, a.position, b.position);
    return w2_gaussian(a.gaussian, b.gaussian) + graph_term;
  });
}

Matrix cost_matrix_v1(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1, double gamma) {
  return cost_matrix_v1(VectorInterpolant::from_model(rho0), VectorInterpolant::from_model(rho1), gamma);
}

Matrix cost_matrix_v2(const VectorInterpolant& rho0, const VectorInterpolant& rho1, double gamma) {
  require_gamma(gamma);
  const ChannelGraph& g = rho0.graph();
  return fill_cost(rho0, rho1, [&](const PlacedComponent& a, const PlacedComponent& b) {
    double graph_term = 0.0;
    if (gamma != 0.0) {
      const double d = position_distance(g, a.position, b.position);
      graph_term = gamma * d * d;
    }
    return w2_squared_gaussian(a.gaussian, b.gaussian) + graph_term;
  });
}

Matrix cost_matrix_v2(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1, double gamma) {
  return cost_matrix_v2(VectorInterpolant::from_model(rho0), VectorInterpolant::from_model(rho1), gamma);
}

Mask restriction_mask(const VectorInterpolant& rho0, const VectorInterpolant& rho1) {
  require_compatible(rho0, rho1);
  const ChannelGraph& g = rho0.graph();
  Mask mask(static_cast<Eigen::Index>(rho0.size()), static_cast<Eigen::Index>(rho1.size()));
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    const auto from = support(rho0.components()[i].position);
    for (std::size_t j = 0; j < rho1.size(); ++j) {
      const auto to = support(rho1.components()[j].position);
      bool ok = true;
      for (int u : from)
        for (int w : to) ok = ok && (u == w || g.adjacent(u, w));
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ok;
    }
  }
  return mask;
}

std::optional<TransportResult> vgmm_distance(const VectorInterpolant& rho0, const VectorInterpolant& rho1,
                                             double gamma, Approach approach) {
  require_compatible(rho0, rho1);
  require_balanced(rho0, "rho0");
  require_balanced(rho1, "rho1");
  TransportResult out;
  switch (approach) {
    case Approach::restricted: {
      out.cost = fill_cost(rho0, rho1, [](const PlacedComponent& a, const PlacedComponent& b) {
        return w2_squared_gaussian(a.gaussian, b.gaussian);
      });
      auto sol = solve_transport_masked(out.cost, rho0.weights(), rho1.weights(), restriction_mask(rho0, rho1));
      if (!sol) return std::nullopt;
      out.objective = sol->value;
      out.distance = std::sqrt(std::max(0.0, sol->value));
      out.plan = std::move(sol->coupling.plan);
      return out;
    }
    case Approach::additive: {
      out.cost = cost_matrix_v1(rho0, rho1, gamma);
      TransportSolution sol = solve_transport(out.cost, rho0.weights(), rho1.weights());
      out.objective = sol.value;
      out.distance = sol.value;
      out.plan = std::move(sol.coupling.plan);
      return out;
    }
    case Approach::squared: {
      out.cost = cost_matrix_v2(rho0, rho1, gamma);
      TransportSolution sol = solve_transport(out.cost, rho0.weights(), rho1.weights());
      out.objective = sol.value;
      out.distance = std::sqrt(std::max(0.0, sol.value));
      out.plan = std::move(sol.coupling.plan);
      return out;
    }
  }
  throw InputError("unknown approach");
}

std::optional<TransportResult> vgmm_distance(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                             double gamma, Approach approach) {
  return vgmm_distance(VectorInterpolant::from_model(rho0), VectorInterpolant::from_model(rho1), gamma, approach);
}

VectorInterpolant vgmm_interpolate_with_plan(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1,
                                             const Matrix& plan, double t, Approach approach) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "interpolation time " << t << " outside [0, 1]";
    throw InputError(os.str());
  }
  if (!(rho0.graph() == rho1.graph())) throw InputError("vector mixtures are defined on different channel graphs");
  if (plan.rows() != static_cast<Eigen::Index>(rho0.size()) ||
      plan.cols() != static_cast<Eigen::Index>(rho1.size())) {
    throw InputError("plan shape does not match the vector mixtures");
  }
  const ChannelGraph& g = rho0.graph();
  std::vector<PlacedComponent> out;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    const VectorComponent& a = rho0.components()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (!(plan(i, j) > 0.0)) continue;
      const VectorComponent& b = rho1.components()[static_cast<std::size_t>(j)];
      GraphPosition pos;
      if (approach == Approach::restricted) {
        pos = GraphPosition::blend(a.channel, b.channel, t);
      } else {
        pos = path_interpolate(g, g.shortest_path(a.channel, b.channel).nodes, t);
      }
      out.push_back({plan(i, j), gaussian_interpolate(a.gaussian, b.gaussian, t), pos});
    }
  }
  return VectorInterpolant(rho0.graph_ptr(), std::move(out));
}

VectorInterpolant vgmm_interpolate(const VectorMixtureModel& rho0, const VectorMixtureModel& rho1, double t,
                                   double gamma, Approach approach) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "interpolation time " << t << " outside [0, 1]";
    throw InputError(os.str());
  }
  auto result = vgmm_distance(rho0, rho1, gamma, approach);
  if (!result) throw InfeasibleError("infeasible under graph restriction");
  return vgmm_interpolate_with_plan(rho0, rho1, result->plan, t, approach);
}

bool canonically_equal(const VectorMixtureModel& a, const VectorMixtureModel& b, double tol) {
  if (!(a.graph() == b.graph()) || a.dim() != b.dim()) return false;
  auto canon = [tol](const VectorMixtureModel& m) {
    std::vector<VectorComponent> sorted = m.components();
    std::stable_sort(sorted.begin(), sorted.end(), [](const VectorComponent& x, const VectorComponent& y) {
      if (x.channel != y.channel) return x.channel < y.channel;
      return lexicographic_less(x.gaussian, y.gaussian);
    });
    std::vector<VectorComponent> merged;
    for (const VectorComponent& c : sorted) {
      if (!merged.empty() && merged.back().channel == c.channel &&
          approx_equal(merged.back().gaussian, c.gaussian, tol)) {
        merged.back().weight += c.weight;
      } else {
        merged.push_back(c);
      }
    }
    return merged;
  };
  const auto ca = canon(a);
  const auto cb = canon(b);
  if (ca.size() != cb.size()) return false;
  for (std::size_t k = 0; k < ca.size(); ++k) {
    if (ca[k].channel != cb[k].channel || std::abs(ca[k].weight - cb[k].weight) > tol ||
        !approx_equal(ca[k].gaussian, cb[k].gaussian, tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace vgmm
