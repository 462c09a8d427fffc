#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vgmm/errors.hpp"
#include "vgmm/vector_gmm_ot.hpp"

using namespace vgmm;

namespace {

GraphPtr share(ChannelGraph g) { return std::make_shared<const ChannelGraph>(std::move(g)); }

VectorMixtureModel one(const GraphPtr& g, double mean, double var, int channel) {
  return VectorMixtureModel(g, {{1.0, Gaussian::scalar(mean, var), channel}});
}

}  // namespace

TEST_CASE("cost matrices on the chain fixture") {
  // W2 = 3 between N(0,1) and N(3,1); channels 0 and 2 are 2 hops apart.
  // c1 = 3 + 0.5 * 2 = 4, c2 = 9 + 0.5 * 4 = 11.
  const GraphPtr g = share(ChannelGraph::chain(3));
  const auto a = one(g, 0, 1, 0), b = one(g, 3, 1, 2);
  CHECK(cost_matrix_v1(a, b, 0.5)(0, 0) == doctest::Approx(4.0));
  CHECK(cost_matrix_v2(a, b, 0.5)(0, 0) == doctest::Approx(11.0));
  CHECK(vgmm_distance(a, b, 0.5, Approach::additive)->distance == doctest::Approx(4.0));
  CHECK(vgmm_distance(a, b, 0.5, Approach::squared)->distance == doctest::Approx(std::sqrt(11.0)));
}

TEST_CASE("restricted approach on the chain: infeasible, while 1 and 2 are finite") {
  const GraphPtr g = share(ChannelGraph::chain(3));
  const auto a = one(g, 0, 1, 0), b = one(g, 0, 1, 2);
  CHECK_FALSE(vgmm_distance(a, b, 1.0, Approach::restricted).has_value());
  CHECK(std::isfinite(vgmm_distance(a, b, 1.0, Approach::additive)->distance));
  CHECK(std::isfinite(vgmm_distance(a, b, 1.0, Approach::squared)->distance));
  CHECK_THROWS_AS(vgmm_interpolate(a, b, 0.5, 1.0, Approach::restricted), InfeasibleError);
}

TEST_CASE("restricted approach is only a pseudo-metric") {
  const GraphPtr g = share(ChannelGraph::chain(2));
  const auto a = one(g, 1, 2, 0), b = one(g, 1, 2, 1);
  const auto r = vgmm_distance(a, b, 1.0, Approach::restricted);
  REQUIRE(r.has_value());
  CHECK(r->distance == 0.0);
  CHECK_FALSE(canonically_equal(a, b));
  CHECK(vgmm_distance(a, b, 1.0, Approach::squared)->distance > 0.0);
}

TEST_CASE("restricted approach breaks the triangle inequality off complete graphs") {
  // Swapping two far-apart Gaussians between channels 0 and 2 of a chain must
  // pair them within each channel (0 and 2 are not adjacent), but both
  // configurations are at distance 0 from the one with everything on channel 1.
  const GraphPtr g = share(ChannelGraph::chain(3));
  const Gaussian x = Gaussian::scalar(0, 1), y = Gaussian::scalar(10, 1);
  const VectorMixtureModel r0(g, {{0.5, x, 0}, {0.5, y, 2}});
  const VectorMixtureModel r1(g, {{0.5, x, 1}, {0.5, y, 1}});
  const VectorMixtureModel r2(g, {{0.5, x, 2}, {0.5, y, 0}});
  const double d01 = vgmm_distance(r0, r1, 1.0, Approach::restricted)->distance;
  const double d12 = vgmm_distance(r1, r2, 1.0, Approach::restricted)->distance;
  const double d02 = vgmm_distance(r0, r2, 1.0, Approach::restricted)->distance;
  CHECK(d01 == doctest::Approx(0.0));
  CHECK(d12 == doctest::Approx(0.0));
  CHECK(d02 == doctest::Approx(10.0));
}

TEST_CASE("metric properties of approaches 1 and 2 on random models") {
  testing::Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const GraphPtr g = share(testing::random_graph(rng, testing::uniform_int(rng, 1, 4)));
    const Eigen::Index dim = testing::uniform_int(rng, 1, 3);
    const auto a = testing::random_vector_mixture(rng, g, dim, testing::uniform_int(rng, 1, 5));
    const auto b = testing::random_vector_mixture(rng, g, dim, testing::uniform_int(rng, 1, 5));
    const auto c = testing::random_vector_mixture(rng, g, dim, testing::uniform_int(rng, 1, 5));
    const double gamma = testing::uniform(rng, 0.1, 5.0);
    for (Approach ap : {Approach::additive, Approach::squared}) {
      const double ab = vgmm_distance(a, b, gamma, ap)->distance, ba = vgmm_distance(b, a, gamma, ap)->distance;
      const double ac = vgmm_distance(a, c, gamma, ap)->distance, bc = vgmm_distance(b, c, gamma, ap)->distance;
      CHECK(std::abs(ab - ba) < 1e-9);
      CHECK(ac <= ab + bc + 1e-7);
    }
  }
}

TEST_CASE("one channel reduces to the scalar distance") {
  testing::Rng rng(5);
  const GraphPtr g = share(ChannelGraph::single());
  const MixtureModel a = testing::random_mixture(rng, 2, 3), b = testing::random_mixture(rng, 2, 2);
  std::vector<VectorComponent> va, vb;
  for (const auto& c : a.components()) va.push_back({c.weight, c.gaussian, 0});
  for (const auto& c : b.components()) vb.push_back({c.weight, c.gaussian, 0});
  const VectorMixtureModel ra(g, va), rb(g, vb);
  const double scalar = gmm_distance(a, b).distance;
  CHECK(vgmm_distance(ra, rb, 3.0, Approach::squared)->distance == doctest::Approx(scalar));
  CHECK(vgmm_distance(ra, rb, 3.0, Approach::restricted)->distance == doctest::Approx(scalar));
}

TEST_CASE("interpolation travels along the shortest path") {
  const GraphPtr g = share(ChannelGraph::chain(3));
  const auto a = one(g, 0, 1, 0), b = one(g, 4, 1, 2);
  for (Approach ap : {Approach::additive, Approach::squared}) {
    const VectorInterpolant mid = vgmm_interpolate(a, b, 0.5, 1.0, ap);
    REQUIRE(mid.size() == 1);
    CHECK(mid.components()[0].position == GraphPosition::node(1));
    CHECK(mid.components()[0].gaussian.mean()(0) == doctest::Approx(2.0));
    const VectorInterpolant quarter = vgmm_interpolate(a, b, 0.25, 1.0, ap);
    CHECK(quarter.channel_masses()(0) == doctest::Approx(0.5));
    CHECK(quarter.channel_masses()(1) == doctest::Approx(0.5));
  }
}

TEST_CASE("restricted interpolation blends the two channels directly") {
  const GraphPtr g = share(ChannelGraph::complete(3));
  const auto a = one(g, 0, 1, 0), b = one(g, 0, 1, 2);
  const VectorInterpolant mid = vgmm_interpolate(a, b, 0.5, 1.0, Approach::restricted);
  CHECK(mid.channel_masses()(0) == doctest::Approx(0.5));
  CHECK(mid.channel_masses()(1) == 0.0);
  CHECK(mid.channel_masses()(2) == doctest::Approx(0.5));
}

TEST_CASE("geodesic linearity with fractional positions") {
  testing::Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const GraphPtr g = share(testing::random_graph(rng, 4));
    const auto a = testing::random_vector_mixture(rng, g, 2, 3);
    const auto b = testing::random_vector_mixture(rng, g, 2, 3);
    for (Approach ap : {Approach::additive, Approach::squared}) {
      const double gamma = 2.0;
      const TransportResult r = *vgmm_distance(a, b, gamma, ap);
      const VectorInterpolant s = vgmm_interpolate_with_plan(a, b, r.plan, 0.25, ap);
      const VectorInterpolant t = vgmm_interpolate_with_plan(a, b, r.plan, 0.75, ap);
      CHECK(vgmm_distance(s, t, gamma, ap)->distance == doctest::Approx(0.5 * r.distance).epsilon(1e-7));
      CHECK(s.mass() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("endpoints reproduce the inputs") {
  testing::Rng rng(6);
  const GraphPtr g = share(ChannelGraph::chain(3));
  const auto a = testing::random_vector_mixture(rng, g, 1, 3);
  const auto b = testing::random_vector_mixture(rng, g, 1, 2);
  for (Approach ap : {Approach::additive, Approach::squared}) {
    const VectorInterpolant s0 = vgmm_interpolate(a, b, 0.0, 1.0, ap);
    const VectorInterpolant s1 = vgmm_interpolate(a, b, 1.0, 1.0, ap);
    CHECK((s0.channel_masses() - a.channel_masses()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s1.channel_masses() - b.channel_masses()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(vgmm_distance(s0, VectorInterpolant::from_model(a), 1.0, ap)->distance < 1e-7);
  }
}

TEST_CASE("gamma controls cross-channel routing") {
  const GraphPtr g = share(ChannelGraph::chain(3));
  const VectorMixtureModel a(g, {{0.5, Gaussian::scalar(-3, 1), 0}, {0.5, Gaussian::scalar(3, 1), 2}});
  const VectorMixtureModel b(g, {{0.5, Gaussian::scalar(3, 1), 0}, {0.5, Gaussian::scalar(-3, 1), 2}});
  const Matrix large = vgmm_distance(a, b, 1e6, Approach::squared)->plan;
  CHECK(large(0, 0) == doctest::Approx(0.5));
  CHECK(large(1, 1) == doctest::Approx(0.5));
  const Matrix small = vgmm_distance(a, b, 1e-3, Approach::squared)->plan;
  CHECK(small(0, 1) == doctest::Approx(0.5));
  CHECK(small(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("vector model validation") {
  const GraphPtr g = share(ChannelGraph::chain(2));
  CHECK_THROWS_AS(VectorMixtureModel(g, {{1.0, Gaussian::scalar(0, 1), 2}}), InputError);
  CHECK_THROWS_AS(VectorMixtureModel(nullptr, {{1.0, Gaussian::scalar(0, 1), 0}}), InputError);
  CHECK_THROWS_AS(VectorMixtureModel(g, {}), InputError);
  const auto a = one(g, 0, 1, 0);
  const auto other = one(share(ChannelGraph::chain(3)), 0, 1, 0);
  CHECK_THROWS_AS(vgmm_distance(a, other, 1.0, Approach::squared), InputError);
  const VectorMixtureModel light(g, {{0.5, Gaussian::scalar(0, 1), 0}});
  CHECK_THROWS_AS(vgmm_distance(a, light, 1.0, Approach::squared), InputError);
  CHECK_THROWS_AS(parse_approach(3), InputError);
  CHECK(parse_approach(1) == Approach::additive);
}
