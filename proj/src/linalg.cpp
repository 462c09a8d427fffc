#include "vgmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kClampRel = 1e-10;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix from_spectrum(const Matrix& vectors, const Vector& values) {
  return symmetrized(vectors * values.asDiagonal() * vectors.transpose());
}

}  // namespace

bool is_symmetric(const Matrix& s) {
  if (s.rows() != s.cols()) return false;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) {
      const double scale = std::max(1.0, std::abs(s(i, j)));
      if (!(std::abs(s(i, j) - s(j, i)) <= 1e-10 * scale)) return false;
    }
  }
  return true;
}

void require_symmetric(const Matrix& s, const char* what) {
  if (s.rows() == 0 || s.rows() != s.cols()) {
    std::ostringstream os;
    os << what << " must be a non-empty square matrix, got " << s.rows() << "x" << s.cols();
    throw InputError(os.str());
  }
  if (!s.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
  if (!is_symmetric(s)) throw InputError(std::string(what) + " is not symmetric");
}

SymEig sym_eig(const Matrix& s) {
  require_symmetric(s);
  const Eigen::Index n = s.rows();
  Matrix a = symmetrized(s);
  Matrix v = Matrix::Identity(n, n);

  const double total = a.squaredNorm();
  bool converged = n == 1 || total == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle annihilating a(p,q); the smaller root keeps it stable.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off > 1e-28 * total) throw NumericalError("Jacobi eigensolver did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  SymEig out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

Matrix psd_sqrt(const Matrix& s) {
  SymEig eig = sym_eig(s);
  const double lmax = std::max(eig.values.maxCoeff(), 0.0);
  const double tol = kClampRel * lmax;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double& lambda = eig.values(k);
    if (lambda < -tol) {
      std::ostringstream os;
      os << "matrix is not positive semi-definite: eigenvalue " << lambda;
      throw NotPsdError(os.str(), lambda);
    }
    lambda = lambda < 0.0 ? 0.0 : std::sqrt(lambda);
  }
  return from_spectrum(eig.vectors, eig.values);
}

Matrix psd_inv_sqrt(const Matrix& s, double floor) {
  SymEig eig = sym_eig(s);
  const double lmin = eig.values(eig.values.size() - 1);
  if (!(lmin >= floor)) {
    std::ostringstream os;
    os << "singular covariance: smallest eigenvalue " << lmin << " below floor " << floor;
    throw SingularCovarianceError(os.str());
  }
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) eig.values(k) = 1.0 / std::sqrt(eig.values(k));
  return from_spectrum(eig.vectors, eig.values);
}

}  // namespace vgmm
