#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vgmm/em.hpp"
#include "vgmm/errors.hpp"

using namespace vgmm;

namespace {

WeightedSamples two_clusters(testing::Rng& rng, int n) {
  std::normal_distribution<double> noise(0.0, 0.5);
  WeightedSamples s{Matrix(n, 2), Vector(n)};
  for (int i = 0; i < n; ++i) {
    const double cx = i % 3 == 0 ? 5.0 : -5.0;
    s.points(i, 0) = cx + noise(rng);
    s.points(i, 1) = noise(rng);
    s.weights(i) = testing::uniform(rng, 0.2, 1.0);
  }
  return s;
}

}  // namespace

TEST_CASE("single component reproduces weighted moments") {
  testing::Rng rng(1);
  const WeightedSamples s = two_clusters(rng, 200);
  const EmFit fit = fit_gmm_em(s, 1);
  const double w = s.weights.sum();
  const Vector mean = s.points.transpose() * s.weights / w;
  const Matrix centred = s.points.rowwise() - mean.transpose();
  const Matrix cov = centred.transpose() * s.weights.asDiagonal() * centred / w;
  const Gaussian& g = fit.model.components()[0].gaussian;
  CHECK((g.mean() - mean).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((g.covariance() - cov).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.model.components()[0].weight == doctest::Approx(1.0));
}

TEST_CASE("log-likelihood never decreases") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    testing::Rng rng(seed + 100);
    const WeightedSamples s = two_clusters(rng, 150);
    EmOptions opts;
    opts.seed = seed;
    const EmFit fit = fit_gmm_em(s, 3, opts);
    for (std::size_t k = 1; k < fit.log_likelihood.size(); ++k)
      CHECK(fit.log_likelihood[k] >= fit.log_likelihood[k - 1] - 1e-9 * std::abs(fit.log_likelihood[k - 1]));
    CHECK(fit.log_likelihood.back() == doctest::Approx(weighted_log_likelihood(s, fit.model)));
  }
}

TEST_CASE("two separated clusters are recovered") {
  testing::Rng rng(7);
  const WeightedSamples s = two_clusters(rng, 300);
  const EmFit fit = fit_gmm_em(s, 2);
  CHECK(fit.converged);
  std::vector<double> xs;
  for (const auto& c : fit.model.components()) xs.push_back(c.gaussian.mean()(0));
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(-5.0).epsilon(0.05));
  CHECK(xs[1] == doctest::Approx(5.0).epsilon(0.05));
  CHECK(fit.model.mass() == doctest::Approx(1.0));
  const Matrix r = responsibilities(s, fit.model);
  CHECK((r.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("fits are deterministic for a seed") {
  testing::Rng rng(3);
  const WeightedSamples s = two_clusters(rng, 100);
  EmOptions opts;
  opts.seed = 42;
  const EmFit a = fit_gmm_em(s, 4, opts), b = fit_gmm_em(s, 4, opts);
  REQUIRE(a.model.size() == b.model.size());
  for (std::size_t k = 0; k < a.model.size(); ++k) {
    CHECK(a.model.components()[k].weight == b.model.components()[k].weight);
    CHECK(a.model.components()[k].gaussian.mean() == b.model.components()[k].gaussian.mean());
  }
}

TEST_CASE("degenerate data keeps covariances positive definite") {
  // All points on a line: the orthogonal variance is held at the jitter.
  WeightedSamples s{Matrix(20, 2), Vector::Ones(20)};
  for (int i = 0; i < 20; ++i) s.points.row(i) << i, 2.0 * i;
  const EmFit fit = fit_gmm_em(s, 2);
  for (const auto& c : fit.model.components()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c.gaussian.covariance());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("EM input errors") {
  WeightedSamples s{Matrix(3, 1), Vector::Ones(3)};
  s.points << 0, 1, 1;
  CHECK_THROWS_AS(fit_gmm_em(s, 3), InputError);  // only two distinct points
  CHECK_THROWS_AS(fit_gmm_em(s, 0), InputError);
  WeightedSamples zero{Matrix::Zero(2, 1), Vector::Zero(2)};
  CHECK_THROWS_AS(fit_gmm_em(zero, 1), InputError);
  WeightedSamples neg{Matrix::Zero(2, 1), Vector::Ones(2)};
  neg.weights(0) = -1;
  CHECK_THROWS_AS(fit_gmm_em(neg, 1), InputError);
}
