#include "vgmm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

void require_same_dim(const Gaussian& a, const Gaussian& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw InputError(os.str());
  }
}

// Lexicographic three-way comparison over the raw coefficients.
int compare(const Gaussian& a, const Gaussian& b) {
  if (a.dim() != b.dim()) return a.dim() < b.dim() ? -1 : 1;
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    if (a.mean()(i) != b.mean()(i)) return a.mean()(i) < b.mean()(i) ? -1 : 1;
  }
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    for (Eigen::Index j = 0; j < a.dim(); ++j) {
      const double x = a.covariance()(i, j), y = b.covariance()(i, j);
      if (x != y) return x < y ? -1 : 1;
    }
  }
  return 0;
}

}  // namespace

Gaussian::Gaussian(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (mean_.size() == 0) throw InputError("Gaussian mean must be non-empty");
  if (!mean_.allFinite()) throw InputError("Gaussian mean has non-finite entries");
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    std::ostringstream os;
    os << "covariance shape " << cov_.rows() << "x" << cov_.cols()
       << " does not match mean length " << mean_.size();
    throw InputError(os.str());
  }
  require_symmetric(cov_, "covariance");
  cov_ = 0.5 * (cov_ + cov_.transpose());
  const double lmin = sym_eig(cov_).values(mean_.size() - 1);
  if (!(lmin > 0.0)) {
    std::ostringstream os;
    os << "covariance is not positive definite (smallest eigenvalue " << lmin << ")";
    throw InputError(os.str());
  }
}

Gaussian Gaussian::scalar(double mean, double variance) {
  return Gaussian(Vector::Constant(1, mean), Matrix::Constant(1, 1, variance));
}

bool approx_equal(const Gaussian& a, const Gaussian& b, double tol) {
  if (a.dim() != b.dim()) return false;
  return ((a.mean() - b.mean()).array().abs() <= tol).all() &&
         ((a.covariance() - b.covariance()).array().abs() <= tol).all();
}

bool lexicographic_less(const Gaussian& a, const Gaussian& b) { return compare(a, b) < 0; }

double w2_squared_gaussian(const Gaussian& g0, const Gaussian& g1) {
  require_same_dim(g0, g1);
  if (approx_equal(g0, g1)) return 0.0;
  // Evaluate in a canonical argument order so the result is bitwise symmetric.
  const bool swap = compare(g1, g0) < 0;
  const Gaussian& a = swap ? g1 : g0;
  const Gaussian& b = swap ? g0 : g1;

  const Matrix root_a = psd_sqrt(a.covariance());
  const Matrix cross = root_a * b.covariance() * root_a;
  const Vector cross_eig = sym_eig(0.5 * (cross + cross.transpose())).values;
  double cross_trace = 0.0;
  for (Eigen::Index k = 0; k < cross_eig.size(); ++k) cross_trace += std::sqrt(std::max(cross_eig(k), 0.0));

  const double mean_term = (a.mean() - b.mean()).squaredNorm();
  const double cov_term = a.covariance().trace() + b.covariance().trace() - 2.0 * cross_trace;
  return std::max(0.0, mean_term + std::max(0.0, cov_term));
}

double w2_gaussian(const Gaussian& g0, const Gaussian& g1) {
  return std::sqrt(w2_squared_gaussian(g0, g1));
}

Gaussian gaussian_interpolate(const Gaussian& g0, const Gaussian& g1, double t) {
  require_same_dim(g0, g1);
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "interpolation time " << t << " outside [0, 1]";
    throw InputError(os.str());
  }
  if (t == 0.0) return g0;
  if (t == 1.0) return g1;

  const Matrix root0 = psd_sqrt(g0.covariance());
  const Matrix inv_root0 = psd_inv_sqrt(g0.covariance());
  const Matrix cross_root = psd_sqrt(root0 * g1.covariance() * root0);
  const Matrix inner = (1.0 - t) * g0.covariance() + t * cross_root;
  Matrix cov = inv_root0 * inner * inner * inv_root0;
  cov = 0.5 * (cov + cov.transpose());
  Vector mean = (1.0 - t) * g0.mean() + t * g1.mean();
  return Gaussian(std::move(mean), std::move(cov));
}

double density(const Gaussian& g, const Vector& x) {
  if (x.size() != g.dim()) {
    std::ostringstream os;
    os << "point dimension " << x.size() << " does not match Gaussian dimension " << g.dim();
    throw InputError(os.str());
  }
  const Eigen::LLT<Matrix> llt(g.covariance());
  if (llt.info() != Eigen::Success) throw NumericalError("covariance Cholesky factorization failed");
  const Vector z = llt.matrixL().solve(x - g.mean());
  double log_det = 0.0;
  const Matrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < g.dim(); ++i) log_det += 2.0 * std::log(l(i, i));
  const double n = static_cast<double>(g.dim());
  return std::exp(-0.5 * z.squaredNorm() - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi));
}

}  // namespace vgmm
