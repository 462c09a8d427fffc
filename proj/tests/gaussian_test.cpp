#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "vgmm/errors.hpp"
#include "vgmm/gaussian.hpp"

using namespace vgmm;

namespace {

Gaussian iso(double x, double y, double var) {
  Vector m(2);
  m << x, y;
  return Gaussian(m, var * Matrix::Identity(2, 2));
}

// Independent evaluation of the closed form with Eigen's eigensolver.
double reference_w2_squared(const Gaussian& a, const Gaussian& b) {
  const Eigen::SelfAdjointEigenSolver<Matrix> ea(a.covariance());
  const Matrix ra = ea.operatorSqrt();
  const Eigen::SelfAdjointEigenSolver<Matrix> cross(ra * b.covariance() * ra);
  const double bures = (a.covariance() + b.covariance()).trace() - 2.0 * cross.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return (a.mean() - b.mean()).squaredNorm() + bures;
}

}  // namespace

TEST_CASE("W2 closed form on hand-computed cases") {
  CHECK(w2_gaussian(iso(0, 0, 1), iso(0, 0, 4)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(w2_squared_gaussian(Gaussian::scalar(0, 1), Gaussian::scalar(3, 4)) == doctest::Approx(10.0));
  CHECK(w2_gaussian(iso(1, 2, 3), iso(1, 2, 3)) == 0.0);

  // Commuting covariances: the Bures term is the squared gap of standard deviations.
  const Gaussian a(Vector::Zero(2), Vector::LinSpaced(2, 1, 4).asDiagonal());
  Matrix c1 = Matrix::Zero(2, 2);
  c1(0, 0) = 9;
  c1(1, 1) = 1;
  CHECK(w2_squared_gaussian(a, Gaussian(Vector::Zero(2), c1)) == doctest::Approx(5.0));
}

TEST_CASE("W2 agrees with an independent evaluation and is symmetric") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = testing::uniform_int(rng, 1, 4);
    const Gaussian a = testing::random_gaussian(rng, n);
    const Gaussian b = testing::random_gaussian(rng, n);
    CHECK(w2_squared_gaussian(a, b) == doctest::Approx(reference_w2_squared(a, b)).epsilon(1e-10));
    CHECK(w2_gaussian(a, b) == w2_gaussian(b, a));
  }
}

TEST_CASE("Gaussian geodesic") {
  SUBCASE("1D midpoint") {
    const Gaussian m = gaussian_interpolate(Gaussian::scalar(0, 1), Gaussian::scalar(3, 4), 0.5);
    CHECK(m.mean()(0) == doctest::Approx(1.5));
    CHECK(m.covariance()(0, 0) == doctest::Approx(2.25));
  }
  SUBCASE("endpoints are exact") {
    const Gaussian a = iso(0, 1, 2), b = iso(3, -1, 0.5);
    CHECK(approx_equal(gaussian_interpolate(a, b, 0.0), a, 0.0));
    CHECK(approx_equal(gaussian_interpolate(a, b, 1.0), b, 0.0));
  }
  SUBCASE("constant speed") {
    testing::Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Gaussian a = testing::random_gaussian(rng, 3), b = testing::random_gaussian(rng, 3);
      const double d = w2_gaussian(a, b);
      for (double s : {0.0, 0.3, 0.5}) {
        for (double t : {0.6, 0.8, 1.0}) {
          const double dst = w2_gaussian(gaussian_interpolate(a, b, s), gaussian_interpolate(a, b, t));
          CHECK(dst == doctest::Approx((t - s) * d).epsilon(1e-8));
        }
      }
    }
  }
  SUBCASE("time outside [0, 1]") {
    CHECK_THROWS_AS(gaussian_interpolate(iso(0, 0, 1), iso(1, 1, 1), 1.5), InputError);
    CHECK_THROWS_AS(gaussian_interpolate(iso(0, 0, 1), iso(1, 1, 1), -0.1), InputError);
  }
}

TEST_CASE("density") {
  CHECK(density(Gaussian::scalar(0, 1), Vector::Zero(1)) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)));
  // Product of two unit normals at distance 1 in each axis.
  Vector x(2);
  x << 1, 1;
  CHECK(density(iso(0, 0, 1), x) == doctest::Approx(std::exp(-1.0) / (2 * M_PI)));
}

TEST_CASE("Gaussian validation") {
  CHECK_THROWS_AS(Gaussian::scalar(0, 0), InputError);
  CHECK_THROWS_AS(Gaussian::scalar(0, -1), InputError);
  Matrix skew(2, 2);
  skew << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(Gaussian(Vector::Zero(2), skew), InputError);
  CHECK_THROWS_AS(Gaussian(Vector::Zero(3), Matrix::Identity(2, 2)), InputError);
  CHECK_THROWS_AS(w2_gaussian(Gaussian::scalar(0, 1), iso(0, 0, 1)), InputError);
}
