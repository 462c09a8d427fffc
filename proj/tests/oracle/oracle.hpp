#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace vgmm::oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Discrete 1D distribution on strictly ascending points.
struct Grid1D {
  std::vector<double> points;
  std::vector<double> masses;
};

/// Samples the density of N(mean, variance) at n points spread uniformly over
/// [lo, hi] and normalizes the masses.
Grid1D discretize_normal(double mean, double variance, double lo, double hi, int n);

/// W2 between two normalized grids via the monotone (quantile) coupling.
double w2_1d_quantile(const Grid1D& f0, const Grid1D& f1);

/// Optimal transport value by enumerating every basic solution of the
/// transportation polytope (spanning trees of the bipartite support graph).
/// Cells with mask == false must carry zero flow. Returns nullopt when no
/// basic solution is feasible. Limited to n0, n1 <= 4.
std::optional<double> enumerate_transport_vertices(const Matrix& cost, const Vector& p0, const Vector& p1,
                                                   const std::optional<BoolMatrix>& mask = std::nullopt);

/// Maximum flow from rows to columns through allowed cells, computed as the
/// minimum cut over all row subsets.
double max_bipartite_flow(const Vector& p0, const Vector& p1, const BoolMatrix& mask);

/// True iff the masked transportation polytope is nonempty.
bool mask_feasible(const Vector& p0, const Vector& p1, const BoolMatrix& mask);

}  // namespace vgmm::oracle
