#include <doctest.h>

#include <cmath>

#include "vgmm/channel_graph.hpp"
#include "vgmm/errors.hpp"

using namespace vgmm;

TEST_CASE("factory graphs") {
  const ChannelGraph chain = ChannelGraph::chain(3);
  CHECK(chain.node_count() == 3);
  CHECK(chain.adjacent(0, 1));
  CHECK_FALSE(chain.adjacent(0, 2));
  CHECK(chain.distance(0, 2) == 2.0);
  CHECK(chain.has_uniform_lengths());

  const ChannelGraph full = ChannelGraph::complete(4);
  for (int u = 0; u < 4; ++u)
    for (int w = 0; w < 4; ++w) CHECK(full.distance(u, w) == (u == w ? 0.0 : 1.0));

  CHECK(ChannelGraph::single().node_count() == 1);
  CHECK(ChannelGraph::single().distance(0, 0) == 0.0);
}

TEST_CASE("weighted shortest paths") {
  // 0 -1- 1 -1- 2 and a direct 0-2 edge of length 3.
  const ChannelGraph g(3, {{0, 1}, {1, 2}, {0, 2}}, {1.0, 1.0, 3.0});
  CHECK(g.distance(0, 2) == 2.0);
  CHECK(g.shortest_path(0, 2).nodes == std::vector<int>{0, 1, 2});
  CHECK(g.shortest_path(2, 0).nodes == std::vector<int>{2, 1, 0});
  CHECK(g.shortest_path(1, 1).nodes == std::vector<int>{1});
  CHECK_FALSE(g.has_uniform_lengths());
}

TEST_CASE("ties break towards the lexicographically smallest path") {
  // 4-cycle 0-1-2-3-0: both 0-1-2 and 0-3-2 have length 2.
  const ChannelGraph cycle(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(cycle.shortest_path(0, 2).nodes == std::vector<int>{0, 1, 2});
  CHECK(cycle.shortest_path(2, 0).nodes == std::vector<int>{2, 1, 0});
  CHECK(cycle.shortest_path(1, 3).nodes == std::vector<int>{1, 0, 3});
  CHECK(cycle.shortest_path(1, 3).length == 2.0);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(ChannelGraph(3, {{0, 1}}), InputError);  // disconnected
  CHECK_THROWS_AS(ChannelGraph(2, {{0, 0}, {0, 1}}), InputError);
  CHECK_THROWS_AS(ChannelGraph(2, {{0, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(ChannelGraph(2, {{0, 2}}), InputError);
  CHECK_THROWS_AS(ChannelGraph(2, {{0, 1}}, {0.0}), InputError);
  CHECK_THROWS_AS(ChannelGraph(2, {{0, 1}}, {1.0, 2.0}), InputError);
  CHECK_THROWS_AS(ChannelGraph(0, {}), InputError);
  CHECK_THROWS_AS(ChannelGraph::chain(3).distance(0, 3), InputError);
}

TEST_CASE("graph equality") {
  CHECK(ChannelGraph::chain(3) == ChannelGraph(3, {{1, 2}, {0, 1}}));
  CHECK_FALSE(ChannelGraph::chain(3) == ChannelGraph::complete(3));
  CHECK_FALSE(ChannelGraph::chain(2) == ChannelGraph(2, {{0, 1}}, {2.0}));
}

TEST_CASE("path interpolation") {
  SUBCASE("midpoint of a three-edge path lies halfway along the middle edge") {
    // Path 0 -> 2 -> 3 -> 1; at t = 0.5 the position is halfway from 2 to 3.
    const ChannelGraph g(4, {{0, 2}, {2, 3}, {3, 1}});
    const std::vector<int> path = g.shortest_path(0, 1).nodes;
    CHECK(path == std::vector<int>{0, 2, 3, 1});
    const GraphPosition mid = path_interpolate(g, path, 0.5);
    CHECK(mid.node_a == 2);
    CHECK(mid.node_b == 3);
    CHECK(mid.fraction == doctest::Approx(0.5));
    const Vector d = delta_vector(mid, 4);
    CHECK(d(2) == doctest::Approx(0.5));
    CHECK(d(3) == doctest::Approx(0.5));
    CHECK(d.sum() == doctest::Approx(1.0));
  }
  SUBCASE("arc length parameterization on unequal edges") {
    const ChannelGraph g(3, {{0, 1}, {1, 2}}, {1.0, 3.0});
    const GraphPosition p = path_interpolate(g, {0, 1, 2}, 0.5);  // 2 of 4 units
    CHECK(p.node_a == 1);
    CHECK(p.node_b == 2);
    CHECK(p.fraction == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("endpoints are pure nodes") {
    const ChannelGraph g = ChannelGraph::chain(3);
    CHECK(path_interpolate(g, {0, 1, 2}, 0.0) == GraphPosition::node(0));
    CHECK(path_interpolate(g, {0, 1, 2}, 1.0) == GraphPosition::node(2));
    CHECK(path_interpolate(g, {0, 1, 2}, 0.5) == GraphPosition::node(1));
    CHECK(path_interpolate(g, {1}, 0.7) == GraphPosition::node(1));
    CHECK_THROWS_AS(path_interpolate(g, {0, 1}, 1.2), InputError);
  }
}

TEST_CASE("positions on the metric graph") {
  const ChannelGraph g = ChannelGraph::chain(3);
  CHECK(GraphPosition::blend(0, 1, 0.0) == GraphPosition::node(0));
  CHECK(GraphPosition::blend(0, 1, 1.0) == GraphPosition::node(1));
  CHECK(is_on_graph(g, GraphPosition::blend(0, 1, 0.3)));
  CHECK_FALSE(is_on_graph(g, GraphPosition::blend(0, 2, 0.3)));
  CHECK_THROWS_AS(position_distance(g, GraphPosition::blend(0, 2, 0.3), GraphPosition::node(0)), InputError);

  CHECK(position_distance(g, GraphPosition::node(0), GraphPosition::node(2)) == 2.0);
  CHECK(position_distance(g, GraphPosition::blend(0, 1, 0.25), GraphPosition::node(2)) == doctest::Approx(1.75));
  CHECK(position_distance(g, GraphPosition::blend(0, 1, 0.25), GraphPosition::blend(0, 1, 0.75)) ==
        doctest::Approx(0.5));
  CHECK(position_distance(g, GraphPosition::blend(0, 1, 0.25), GraphPosition::blend(1, 0, 0.25)) ==
        doctest::Approx(0.5));
  CHECK(position_distance(g, GraphPosition::blend(0, 1, 0.5), GraphPosition::blend(1, 2, 0.5)) ==
        doctest::Approx(1.0));

  // Both positions sit close to node 1, so the route through it wins.
  const ChannelGraph tri = ChannelGraph::complete(3);
  CHECK(position_distance(tri, GraphPosition::blend(0, 1, 0.9), GraphPosition::blend(1, 2, 0.2)) ==
        doctest::Approx(0.3));
}
