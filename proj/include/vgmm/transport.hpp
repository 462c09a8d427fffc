#pragma once

#include <optional>

#include "vgmm/linalg.hpp"

namespace vgmm {

/// Allowed-cell pattern for restricted couplings: mask(i, j) == false forces
/// plan(i, j) = 0.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Transport plan together with the marginals it was solved for.
struct Coupling {
  Matrix plan;
  Vector row_marginal;
  Vector col_marginal;
};

struct TransportSolution {
  double value = 0.0;  // sum of cost(i, j) * plan(i, j)
  Coupling coupling;
};

/// Exact optimum of the discrete Kantorovich problem
///   min sum cost(i,j) pi(i,j)  s.t.  pi 1 = p0, pi^T 1 = p1, pi >= 0
/// via the transportation simplex (north-west corner start, MODI potentials,
/// Bland's rule). Entries equal to +inf are treated as forbidden cells; if
/// they make the problem infeasible, InfeasibleError is thrown.
TransportSolution solve_transport(const Matrix& cost, const Vector& p0, const Vector& p1);

/// Same as solve_transport over the restricted polytope. Returns nullopt when
/// no coupling respects the mask.
std::optional<TransportSolution> solve_transport_masked(const Matrix& cost, const Vector& p0,
                                                        const Vector& p1, const Mask& mask);

/// Whether the masked transportation polytope is nonempty, decided by a
/// max-flow on the bipartite graph of allowed cells.
bool transport_feasible(const Vector& p0, const Vector& p1, const Mask& mask);

}  // namespace vgmm
