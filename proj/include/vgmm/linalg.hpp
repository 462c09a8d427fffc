#pragma once

#include <Eigen/Dense>

namespace vgmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigen-pairs of a symmetric matrix, eigenvalues sorted in descending order
/// and eigenvectors stored column-wise in the matching order.
struct SymEig {
  Vector values;
  Matrix vectors;
};

/// True if |s(i,j) - s(j,i)| <= 1e-10 * max(1, |s(i,j)|) for all entries.
bool is_symmetric(const Matrix& s);

/// Throws InputError unless `s` is square and symmetric.
void require_symmetric(const Matrix& s, const char* what = "matrix");

/// Cyclic Jacobi eigendecomposition. Throws NumericalError if the sweep cap
/// is reached before the off-diagonal mass vanishes.
SymEig sym_eig(const Matrix& s);

/// Principal square root of a positive semi-definite matrix. Eigenvalues in
/// [-1e-10 * lambda_max, 0) are clamped to zero; anything more negative
/// raises NotPsdError.
Matrix psd_sqrt(const Matrix& s);

/// Inverse principal square root. Throws SingularCovarianceError if the
/// smallest eigenvalue is below `floor`.
Matrix psd_inv_sqrt(const Matrix& s, double floor = 1e-12);

}  // namespace vgmm
