#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vgmm::oracle {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kFlowTol = 1e-12;

void check_grid(const Grid1D& f) {
  if (f.points.empty() || f.points.size() != f.masses.size()) throw std::invalid_argument("grid shape mismatch");
  for (std::size_t i = 1; i < f.points.size(); ++i)
    if (!(f.points[i] > f.points[i - 1])) throw std::invalid_argument("grid points must be strictly ascending");
  double total = 0.0;
  for (double m : f.masses) {
    if (m < 0.0) throw std::invalid_argument("negative grid mass");
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTol) throw std::invalid_argument("grid masses must sum to 1");
}

// Flows of the basic solution whose basis is `cells` (indices r * n1 + c), or
// nullopt if the cells do not form a spanning tree of rows + columns.
std::optional<std::vector<double>> tree_flows(const std::vector<int>& cells, int n0, int n1, const Vector& p0,
                                              const Vector& p1) {
  const int nodes = n0 + n1;
  std::vector<double> supply(static_cast<std::size_t>(nodes));
  for (int r = 0; r < n0; ++r) supply[r] = p0(r);
  for (int c = 0; c < n1; ++c) supply[n0 + c] = p1(c);
  std::vector<int> degree(static_cast<std::size_t>(nodes), 0);
  for (int cell : cells) {
    ++degree[cell / n1];
    ++degree[n0 + cell % n1];
  }
  std::vector<double> flow(cells.size(), 0.0);
  std::vector<bool> used(cells.size(), false);
  for (std::size_t step = 0; step < cells.size(); ++step) {
    // Any leaf fixes the flow on its single remaining edge.
    int leaf_edge = -1, leaf_node = -1;
    for (std::size_t e = 0; e < cells.size() && leaf_edge < 0; ++e) {
      if (used[e]) continue;
      const int r = cells[e] / n1, c = n0 + cells[e] % n1;
      if (degree[r] == 1) leaf_edge = static_cast<int>(e), leaf_node = r;
      else if (degree[c] == 1) leaf_edge = static_cast<int>(e), leaf_node = c;
    }
    if (leaf_edge < 0) return std::nullopt;  // contains a cycle
    const int r = cells[leaf_edge] / n1, c = n0 + cells[leaf_edge] % n1;
    const int other = leaf_node == r ? c : r;
    const double f = supply[leaf_node];
    flow[leaf_edge] = f;
    supply[leaf_node] = 0.0;
    supply[other] -= f;
    used[leaf_edge] = true;
    --degree[r];
    --degree[c];
  }
  // A forest with n0 + n1 - 1 edges and no cycle is a spanning tree, but
  // guard against nodes never reached anyway.
  for (int d : degree)
    if (d != 0) return std::nullopt;
  return flow;
}

}  // namespace

Grid1D discretize_normal(double mean, double variance, double lo, double hi, int n) {
  Grid1D g;
  const double h = (hi - lo) / (n - 1);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    const double z = (x - mean) * (x - mean) / variance;
    g.points.push_back(x);
    g.masses.push_back(std::exp(-0.5 * z));
    total += g.masses.back();
  }
  for (double& m : g.masses) m /= total;
  return g;
}

double w2_1d_quantile(const Grid1D& f0, const Grid1D& f1) {
  check_grid(f0);
  check_grid(f1);
  std::size_t i = 0, j = 0;
  double r0 = f0.masses[0], r1 = f1.masses[0];
  double total = 0.0;
  while (i < f0.points.size() && j < f1.points.size()) {
    const double m = std::min(r0, r1);
    const double d = f0.points[i] - f1.points[j];
    total += m * d * d;
    r0 -= m;
    r1 -= m;
    if (r0 <= 0.0 && ++i < f0.points.size()) r0 = f0.masses[i];
    if (r1 <= 0.0 && ++j < f1.points.size()) r1 = f1.masses[j];
  }
  return std::sqrt(total);
}

std::optional<double> enumerate_transport_vertices(const Matrix& cost, const Vector& p0, const Vector& p1,
                                                   const std::optional<BoolMatrix>& mask) {
  const int n0 = static_cast<int>(p0.size()), n1 = static_cast<int>(p1.size());
  if (n0 < 1 || n1 < 1 || n0 > 4 || n1 > 4) throw std::invalid_argument("oracle instances are limited to 4x4");
  if (cost.rows() != n0 || cost.cols() != n1) throw std::invalid_argument("cost shape mismatch");
  if (std::abs(p0.sum() - p1.sum()) > kMassTol) throw std::invalid_argument("unequal marginal masses");

  const int cells = n0 * n1, basis = n0 + n1 - 1;
  std::vector<bool> pick(static_cast<std::size_t>(cells), false);
  std::fill(pick.begin(), pick.begin() + basis, true);
  std::optional<double> best;
  do {
    std::vector<int> chosen;
    for (int k = 0; k < cells; ++k)
      if (pick[k]) chosen.push_back(k);
    const auto flows = tree_flows(chosen, n0, n1, p0, p1);
    if (!flows) continue;
    bool feasible = true;
    double value = 0.0;
    for (std::size_t e = 0; e < chosen.size() && feasible; ++e) {
      const int r = chosen[e] / n1, c = chosen[e] % n1;
      const double f = (*flows)[e];
      if (f < -kFlowTol) feasible = false;
      else if (mask && !(*mask)(r, c) && std::abs(f) > kFlowTol) feasible = false;
      else if (f > 0.0) value += cost(r, c) * f;
    }
    if (feasible && (!best || value < *best)) best = value;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

double max_bipartite_flow(const Vector& p0, const Vector& p1, const BoolMatrix& mask) {
  const int n0 = static_cast<int>(p0.size()), n1 = static_cast<int>(p1.size());
  if (n0 > 20) throw std::invalid_argument("too many rows for cut enumeration");
  // Cut = rows outside S (their source edges) + columns adjacent to S.
  double best = INFINITY;
  for (unsigned s = 0; s < (1u << n0); ++s) {
    double cut = 0.0;
    for (int r = 0; r < n0; ++r)
      if (!(s >> r & 1u)) cut += p0(r);
    for (int c = 0; c < n1; ++c) {
      bool adjacent = false;
      for (int r = 0; r < n0 && !adjacent; ++r) adjacent = (s >> r & 1u) && mask(r, c);
      if (adjacent) cut += p1(c);
    }
    best = std::min(best, cut);
  }
  return best;
}

bool mask_feasible(const Vector& p0, const Vector& p1, const BoolMatrix& mask) {
  const double total = p0.sum();
  return max_bipartite_flow(p0, p1, mask) >= total - kFlowTol;
}

}  // namespace vgmm::oracle
