#pragma once

#include <utility>
#include <vector>

#include "vgmm/linalg.hpp"

namespace vgmm {

struct ShortestPath {
  double length = 0.0;
  std::vector<int> nodes;  // starts at the source, ends at the target
};

/// Undirected, connected graph over channels 0..M-1 with positive edge
/// lengths. Immutable after construction; all-pairs distances are
/// precomputed with Dijkstra.
class ChannelGraph {
 public:
  /// `lengths` is either empty (all edges have length 1) or parallel to
  /// `edges`. Throws InputError on self-loops, duplicate edges, non-positive
  /// lengths, out-of-range nodes or a disconnected graph.
  ChannelGraph(int node_count, std::vector<std::pair<int, int>> edges,
               std::vector<double> lengths = {});

  static ChannelGraph single();
  static ChannelGraph chain(int node_count);
  static ChannelGraph complete(int node_count);

  int node_count() const { return node_count_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<double>& lengths() const { return lengths_; }
  bool has_uniform_lengths() const;

  bool adjacent(int u, int w) const;
  /// Length of edge (u, w); throws if the nodes are not adjacent.
  double edge_length(int u, int w) const;
  /// Shortest-path distance between nodes.
  double distance(int u, int w) const;

  /// Minimal-length path; among equal-length paths the lexicographically
  /// smallest node sequence is returned.
  ShortestPath shortest_path(int u, int w) const;

  void check_node(int u) const;

  friend bool operator==(const ChannelGraph& a, const ChannelGraph& b);

 private:
  int node_count_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> lengths_;
  Matrix edge_length_;  // +inf where no edge
  Matrix distance_;
  std::vector<std::vector<int>> neighbours_;  // ascending
};

/// A point of the graph: a node, or a point on edge (node_a, node_b) at
/// `fraction` of the way towards node_b. Pure nodes are stored with
/// node_a == node_b and fraction == 0. Approach-0 interpolation also produces
/// blends of non-adjacent nodes; those are not valid positions of the graph
/// itself (see is_on_graph).
struct GraphPosition {
  int node_a = 0;
  int node_b = 0;
  double fraction = 0.0;

  static GraphPosition node(int u) { return {u, u, 0.0}; }
  /// Normalizes fraction 0 (or 1) to the pure-node form.
  static GraphPosition blend(int a, int b, double fraction);

  bool is_node() const { return node_a == node_b; }
  friend bool operator==(const GraphPosition&, const GraphPosition&) = default;
};

/// Pure node, or a point on an existing edge.
bool is_on_graph(const ChannelGraph& g, const GraphPosition& pos);

/// Position at arc length t * L along `path` (a node list of total length L).
GraphPosition path_interpolate(const ChannelGraph& g, const std::vector<int>& path, double t);

/// Channel weights of a position: (1 - fraction) at node_a, fraction at
/// node_b, zero elsewhere.
Vector delta_vector(const GraphPosition& pos, int node_count);

/// Distance between two points of the metric graph (edges as segments of
/// their length). Along a shortest path this is the arc-length difference;
/// between pure nodes it is the graph distance. Throws InputError for
/// positions that are not on the graph.
double position_distance(const ChannelGraph& g, const GraphPosition& x, const GraphPosition& y);

}  // namespace vgmm
