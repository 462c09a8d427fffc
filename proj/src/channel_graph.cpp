#include "vgmm/channel_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

ChannelGraph::ChannelGraph(int node_count, std::vector<std::pair<int, int>> edges,
                           std::vector<double> lengths)
    : node_count_(node_count), edges_(std::move(edges)), lengths_(std::move(lengths)) {
  if (node_count_ <= 0) throw InputError("graph must have at least one node");
  if (lengths_.empty()) lengths_.assign(edges_.size(), 1.0);
  if (lengths_.size() != edges_.size()) {
    std::ostringstream os;
    os << "graph has " << edges_.size() << " edges but " << lengths_.size() << " lengths";
    throw InputError(os.str());
  }
  edge_length_ = Matrix::Constant(node_count_, node_count_, kInf);
  neighbours_.assign(static_cast<std::size_t>(node_count_), {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, w] = edges_[e];
    if (u < 0 || w < 0 || u >= node_count_ || w >= node_count_) {
      std::ostringstream os;
      os << "edge (" << u << ", " << w << ") references a node outside 0.." << node_count_ - 1;
      throw InputError(os.str());
    }
    if (u == w) throw InputError("self-loop on node " + std::to_string(u));
    if (std::isfinite(edge_length_(u, w))) {
      std::ostringstream os;
      os << "duplicate edge (" << u << ", " << w << ")";
      throw InputError(os.str());
    }
    if (!(lengths_[e] > 0.0) || !std::isfinite(lengths_[e])) {
      std::ostringstream os;
      os << "edge (" << u << ", " << w << ") has non-positive length " << lengths_[e];
      throw InputError(os.str());
    }
    edge_length_(u, w) = edge_length_(w, u) = lengths_[e];
    neighbours_[u].push_back(w);
    neighbours_[w].push_back(u);
  }
  for (auto& list : neighbours_) std::sort(list.begin(), list.end());

  // Dijkstra from every node with a binary heap.
  distance_ = Matrix::Constant(node_count_, node_count_, kInf);
  using Item = std::pair<double, int>;
  for (int s = 0; s < node_count_; ++s) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    distance_(s, s) = 0.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > distance_(s, u)) continue;
      for (int w : neighbours_[u]) {
        const double nd = d + edge_length_(u, w);
        if (nd < distance_(s, w)) {
          distance_(s, w) = nd;
          heap.push({nd, w});
        }
      }
    }
    for (int w = 0; w < node_count_; ++w) {
      if (!std::isfinite(distance_(s, w))) {
        std::ostringstream os;
        os << "graph is not connected: no path between nodes " << s << " and " << w;
        throw InputError(os.str());
      }
    }
  }
}

ChannelGraph ChannelGraph::single() { return ChannelGraph(1, {}); }

ChannelGraph ChannelGraph::chain(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u + 1 < node_count; ++u) edges.emplace_back(u, u + 1);
  return ChannelGraph(node_count, std::move(edges));
}

ChannelGraph ChannelGraph::complete(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < node_count; ++u)
    for (int w = u + 1; w < node_count; ++w) edges.emplace_back(u, w);
  return ChannelGraph(node_count, std::move(edges));
}

bool ChannelGraph::has_uniform_lengths() const {
  return std::all_of(lengths_.begin(), lengths_.end(), [](double l) { return l == 1.0; });
}

void ChannelGraph::check_node(int u) const {
  if (u < 0 || u >= node_count_) {
    std::ostringstream os;
    os << "node index " << u << " outside 0.." << node_count_ - 1;
    throw InputError(os.str());
  }
}

bool ChannelGraph::adjacent(int u, int w) const {
  check_node(u);
  check_node(w);
  return std::isfinite(edge_length_(u, w));
}

double ChannelGraph::edge_length(int u, int w) const {
  if (!adjacent(u, w)) {
    std::ostringstream os;
    os << "nodes " << u << " and " << w << " are not adjacent";
    throw InputError(os.str());
  }
  return edge_length_(u, w);
}

double ChannelGraph::distance(int u, int w) const {
  check_node(u);
  check_node(w);
  return distance_(u, w);
}

ShortestPath ChannelGraph::shortest_path(int u, int w) const {
  check_node(u);
  check_node(w);
  ShortestPath out{distance_(u, w), {u}};
  // Greedy walk: the smallest neighbour that stays on some shortest path
  // yields the lexicographically smallest node sequence.
  int x = u;
  while (x != w) {
    int next = -1;
    for (int y : neighbours_[x]) {
      if (nearly_equal(distance_(x, w), edge_length_(x, y) + distance_(y, w))) {
        next = y;
        break;
      }
    }
    if (next < 0) throw NumericalError("shortest path reconstruction failed");
    out.nodes.push_back(next);
    x = next;
  }
  return out;
}

bool operator==(const ChannelGraph& a, const ChannelGraph& b) {
  if (a.node_count_ != b.node_count_) return false;
  return a.edge_length_ == b.edge_length_;
}

GraphPosition GraphPosition::blend(int a, int b, double fraction) {
  if (a == b || fraction == 0.0) return node(a);
  if (fraction == 1.0) return node(b);
  return {a, b, fraction};
}

bool is_on_graph(const ChannelGraph& g, const GraphPosition& pos) {
  if (pos.node_a < 0 || pos.node_b < 0 || pos.node_a >= g.node_count() ||
      pos.node_b >= g.node_count()) {
    return false;
  }
  if (!(pos.fraction >= 0.0 && pos.fraction <= 1.0)) return false;
  if (pos.is_node()) return pos.fraction == 0.0;
  return g.adjacent(pos.node_a, pos.node_b);
}

GraphPosition path_interpolate(const ChannelGraph& g, const std::vector<int>& path, double t) {
  if (path.empty()) throw InputError("path must contain at least one node");
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "path parameter " << t << " outside [0, 1]";
    throw InputError(os.str());
  }
  for (int u : path) g.check_node(u);
  if (path.size() == 1 || t == 0.0) return GraphPosition::node(path.front());
  if (t == 1.0) return GraphPosition::node(path.back());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) total += g.edge_length(path[k], path[k + 1]);
  double remaining = t * total;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double len = g.edge_length(path[k], path[k + 1]);
    if (remaining < len) return GraphPosition::blend(path[k], path[k + 1], remaining / len);
    remaining -= len;
  }
  return GraphPosition::node(path.back());
}

Vector delta_vector(const GraphPosition& pos, int node_count) {
  if (pos.node_a < 0 || pos.node_b < 0 || pos.node_a >= node_count || pos.node_b >= node_count) {
    std::ostringstream os;
    os << "position (" << pos.node_a << ", " << pos.node_b << ") outside 0.." << node_count - 1;
    throw InputError(os.str());
  }
  Vector out = Vector::Zero(node_count);
  out(pos.node_a) += 1.0 - pos.fraction;
  out(pos.node_b) += pos.fraction;
  return out;
}

double position_distance(const ChannelGraph& g, const GraphPosition& x, const GraphPosition& y) {
  for (const GraphPosition* p : {&x, &y}) {
    if (!is_on_graph(g, *p)) {
      std::ostringstream os;
      os << "position (" << p->node_a << ", " << p->node_b << ", " << p->fraction
         << ") does not lie on the channel graph";
      throw InputError(os.str());
    }
  }
  struct Anchor {
    int node;
    double offset;
  };
  auto anchors = [&](const GraphPosition& p) {
    std::vector<Anchor> out;
    if (p.is_node()) {
      out.push_back({p.node_a, 0.0});
    } else {
      const double len = g.edge_length(p.node_a, p.node_b);
      out.push_back({p.node_a, p.fraction * len});
      out.push_back({p.node_b, (1.0 - p.fraction) * len});
    }
    return out;
  };
  double best = kInf;
  for (const Anchor& a : anchors(x))
    for (const Anchor& b : anchors(y)) best = std::min(best, a.offset + g.distance(a.node, b.node) + b.offset);

  // Both interior to the same edge: the direct segment may be shorter.
  if (!x.is_node() && !y.is_node()) {
    const double len = g.edge_length(x.node_a, x.node_b);
    if (x.node_a == y.node_a && x.node_b == y.node_b) {
      best = std::min(best, std::abs(x.fraction - y.fraction) * len);
    } else if (x.node_a == y.node_b && x.node_b == y.node_a) {
      best = std::min(best, std::abs(x.fraction - (1.0 - y.fraction)) * len);
    }
  }
  return best;
}

}  // namespace vgmm
