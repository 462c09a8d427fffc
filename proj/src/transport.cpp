#include "vgmm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

constexpr double kMarginalTol = 1e-9;
constexpr double kFlowEps = 1e-15;

void validate(const Matrix& cost, const Vector& p0, const Vector& p1) {
  if (cost.rows() != p0.size() || cost.cols() != p1.size()) {
    std::ostringstream os;
    os << "cost matrix is " << cost.rows() << "x" << cost.cols() << " but marginals have sizes "
       << p0.size() << " and " << p1.size();
    throw InputError(os.str());
  }
  if (p0.size() == 0 || p1.size() == 0) throw InputError("marginals must be non-empty");
  for (const Vector* p : {&p0, &p1}) {
    for (Eigen::Index k = 0; k < p->size(); ++k) {
      const double w = (*p)(k);
      if (!std::isfinite(w) || w < 0.0) {
        std::ostringstream os;
        os << "invalid weight " << w << " at index " << k << " (weights must be finite and >= 0)";
        throw InputError(os.str());
      }
    }
  }
  const double s0 = p0.sum(), s1 = p1.sum();
  if (std::abs(s0 - s1) > kMarginalTol) {
    std::ostringstream os;
    os.precision(17);
    os << "marginal masses differ: " << s0 << " vs " << s1;
    throw InputError(os.str());
  }
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double c = cost(i, j);
      if (std::isnan(c) || c < 0.0) {
        std::ostringstream os;
        os << "invalid cost " << c << " at (" << i << ", " << j << ")";
        throw InputError(os.str());
      }
    }
  }
}

// Two-level cost: `big` counts forbidden cells and dominates `small`. This is
// big-M with an infinite M, evaluated exactly.
struct LexValue {
  double big = 0.0;
  double small = 0.0;
};

struct BasicCell {
  int row;
  int col;
  double flow;
};

// Transportation simplex on the support of strictly positive weights.
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, const Mask& allowed, std::vector<double> supply,
                   std::vector<double> demand)
      : rows_(static_cast<int>(supply.size())),
        cols_(static_cast<int>(demand.size())),
        cost_(cost),
        allowed_(allowed),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        basis_index_(static_cast<std::size_t>(rows_) * cols_, -1) {
    double scale = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (allowed_(i, j)) scale = std::max(scale, cost_(i, j));
    rc_eps_ = 1e-12 * (1.0 + scale);
  }

  void solve() {
    north_west_corner();
    const long cap = 100000L + 50L * rows_ * cols_;
    for (long iter = 0; iter < cap; ++iter) {
      compute_potentials();
      int enter_row = -1, enter_col = -1;
      if (!find_entering(enter_row, enter_col)) return;
      pivot(enter_row, enter_col);
    }
    throw NumericalError("transportation simplex exceeded its iteration cap");
  }

  // Flow left on forbidden cells after optimization (zero iff feasible).
  double forbidden_flow() const {
    double total = 0.0;
    for (const BasicCell& c : basis_)
      if (!allowed_(c.row, c.col)) total += c.flow;
    return total;
  }

  const std::vector<BasicCell>& basis() const { return basis_; }

 private:
  LexValue cell_cost(int i, int j) const {
    if (allowed_(i, j)) return {0.0, cost_(i, j)};
    return {1.0, 0.0};
  }

  void add_basic(int i, int j, double flow) {
    basis_index_[index(i, j)] = static_cast<int>(basis_.size());
    basis_.push_back({i, j, flow});
  }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }

  // Staircase start with exactly rows + cols - 1 basic cells (zero flows keep
  // the basis a spanning tree under degeneracy).
  void north_west_corner() {
    std::vector<double> a = supply_, b = demand_;
    int i = 0, j = 0;
    while (true) {
      const double x = std::min(a[i], b[j]);
      add_basic(i, j, x);
      a[i] -= x;
      b[j] -= x;
      if (i == rows_ - 1 && j == cols_ - 1) break;
      if (i == rows_ - 1) {
        ++j;
      } else if (j == cols_ - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_adjacency() {
    adjacency_.assign(static_cast<std::size_t>(rows_ + cols_), {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adjacency_[basis_[k].row].push_back(static_cast<int>(k));
      adjacency_[rows_ + basis_[k].col].push_back(static_cast<int>(k));
    }
  }

  int other_end(int node, const BasicCell& c) const {
    return node < rows_ ? rows_ + c.col : c.row;
  }

  void compute_potentials() {
    build_adjacency();
    const int nodes = rows_ + cols_;
    potential_.assign(static_cast<std::size_t>(nodes), LexValue{});
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int k : adjacency_[node]) {
        const BasicCell& c = basis_[k];
        const int next = other_end(node, c);
        if (seen[next]) continue;
        seen[next] = 1;
        // u_row + v_col = cost(row, col) on basic cells.
        const LexValue cc = cell_cost(c.row, c.col);
        potential_[next] = {cc.big - potential_[node].big, cc.small - potential_[node].small};
        stack.push_back(next);
      }
    }
  }

  // Bland's rule: first nonbasic cell in row-major order with negative
  // reduced cost.
  bool find_entering(int& er, int& ec) const {
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        if (basis_index_[index(i, j)] >= 0) continue;
        const LexValue cc = cell_cost(i, j);
        const LexValue& u = potential_[i];
        const LexValue& v = potential_[rows_ + j];
        const double big = cc.big - u.big - v.big;
        const double small = cc.small - u.small - v.small;
        if (big < -0.5 || (std::abs(big) < 0.5 && small < -rc_eps_)) {
          er = i;
          ec = j;
          return true;
        }
      }
    }
    return false;
  }

  void pivot(int er, int ec) {
    // Tree path from the entering column back to the entering row.
    const int nodes = rows_ + cols_;
    const int start = rows_ + ec;
    std::vector<int> via(static_cast<std::size_t>(nodes), -1);
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::queue<int> queue;
    queue.push(start);
    seen[start] = 1;
    while (!queue.empty() && !seen[er]) {
      const int node = queue.front();
      queue.pop();
      for (int k : adjacency_[node]) {
        const int next = other_end(node, basis_[k]);
        if (seen[next]) continue;
        seen[next] = 1;
        via[next] = k;
        queue.push(next);
      }
    }
    if (!seen[er]) throw NumericalError("transportation basis is not a spanning tree");

    std::vector<int> path;  // basis indices, ordered from the entering column
    for (int node = er; node != start;) {
      const int k = via[node];
      path.push_back(k);
      node = other_end(node, basis_[k]);
    }
    std::reverse(path.begin(), path.end());

    // Edges at even positions lose theta, the others gain it.
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < path.size(); p += 2) theta = std::min(theta, basis_[path[p]].flow);
    int leaving = -1;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const BasicCell& c = basis_[path[p]];
      if (c.flow != theta) continue;
      if (leaving < 0 || c.row < basis_[leaving].row ||
          (c.row == basis_[leaving].row && c.col < basis_[leaving].col)) {
        leaving = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      BasicCell& c = basis_[path[p]];
      if (p % 2 == 0) {
        c.flow -= theta;
        if (c.flow < kFlowEps) c.flow = 0.0;
      } else {
        c.flow += theta;
      }
    }

    // Replace the leaving cell with the entering one in place.
    const BasicCell gone = basis_[leaving];
    basis_index_[index(gone.row, gone.col)] = -1;
    basis_[leaving] = {er, ec, theta};
    basis_index_[index(er, ec)] = leaving;
  }

  int rows_;
  int cols_;
  const Matrix& cost_;
  const Mask& allowed_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  std::vector<BasicCell> basis_;
  std::vector<int> basis_index_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<LexValue> potential_;
  double rc_eps_ = 0.0;
};

std::optional<TransportSolution> solve_impl(const Matrix& cost, const Vector& p0, const Vector& p1,
                                            const Mask& allowed, bool restricted) {
  std::vector<int> rows, cols;
  for (Eigen::Index i = 0; i < p0.size(); ++i)
    if (p0(i) > 0.0) rows.push_back(static_cast<int>(i));
  for (Eigen::Index j = 0; j < p1.size(); ++j)
    if (p1(j) > 0.0) cols.push_back(static_cast<int>(j));

  TransportSolution out;
  out.coupling.plan = Matrix::Zero(p0.size(), p1.size());
  out.coupling.row_marginal = p0;
  out.coupling.col_marginal = p1;
  if (rows.empty() || cols.empty()) return out;

  if (restricted && !transport_feasible(p0, p1, allowed)) return std::nullopt;

  const auto n0 = static_cast<Eigen::Index>(rows.size());
  const auto n1 = static_cast<Eigen::Index>(cols.size());
  Matrix sub_cost(n0, n1);
  Mask sub_allowed(n0, n1);
  std::vector<double> supply, demand;
  for (Eigen::Index r = 0; r < n0; ++r) supply.push_back(p0(rows[r]));
  for (Eigen::Index c = 0; c < n1; ++c) demand.push_back(p1(cols[c]));
  for (Eigen::Index r = 0; r < n0; ++r) {
    for (Eigen::Index c = 0; c < n1; ++c) {
      const double value = cost(rows[r], cols[c]);
      const bool ok = allowed(rows[r], cols[c]) && std::isfinite(value);
      sub_allowed(r, c) = ok;
      sub_cost(r, c) = ok ? value : 0.0;
    }
  }

  TransportSimplex simplex(sub_cost, sub_allowed, std::move(supply), std::move(demand));
  simplex.solve();
  if (simplex.forbidden_flow() > 1e-12) {
    throw NumericalError("transportation simplex left flow on forbidden cells of a feasible instance");
  }

  double value = 0.0;
  for (const BasicCell& c : simplex.basis()) {
    if (c.flow <= 0.0 || !sub_allowed(c.row, c.col)) continue;
    out.coupling.plan(rows[c.row], cols[c.col]) = c.flow;
    value += sub_cost(c.row, c.col) * c.flow;
  }
  out.value = value;
  return out;
}

}  // namespace

TransportSolution solve_transport(const Matrix& cost, const Vector& p0, const Vector& p1) {
  validate(cost, p0, p1);
  const Mask allowed = cost.array().isFinite();
  const bool restricted = !allowed.all();
  auto solution = solve_impl(cost, p0, p1, allowed, restricted);
  if (!solution) throw InfeasibleError("no coupling avoids the infinite-cost cells");
  return *std::move(solution);
}

std::optional<TransportSolution> solve_transport_masked(const Matrix& cost, const Vector& p0,
                                                        const Vector& p1, const Mask& mask) {
  validate(cost, p0, p1);
  if (mask.rows() != cost.rows() || mask.cols() != cost.cols()) {
    std::ostringstream os;
    os << "mask is " << mask.rows() << "x" << mask.cols() << " but cost is " << cost.rows() << "x"
       << cost.cols();
    throw InputError(os.str());
  }
  const Mask allowed = mask && cost.array().isFinite();
  return solve_impl(cost, p0, p1, allowed, true);
}

bool transport_feasible(const Vector& p0, const Vector& p1, const Mask& mask) {
  const auto n0 = static_cast<int>(p0.size());
  const auto n1 = static_cast<int>(p1.size());
  if (mask.rows() != n0 || mask.cols() != n1) throw InputError("mask shape does not match marginals");

  // Node layout: 0 = source, 1..n0 rows, n0+1..n0+n1 cols, n0+n1+1 = sink.
  const int n = n0 + n1 + 2;
  const int source = 0, sink = n - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> residual(static_cast<std::size_t>(n) * n, 0.0);
  auto cap = [&](int u, int v) -> double& { return residual[static_cast<std::size_t>(u) * n + v]; };
  for (int i = 0; i < n0; ++i) cap(source, 1 + i) = p0(i);
  for (int j = 0; j < n1; ++j) cap(1 + n0 + j, sink) = p1(j);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      if (mask(i, j)) cap(1 + i, 1 + n0 + j) = inf;

  // Edmonds-Karp.
  double flow = 0.0;
  std::vector<int> parent(static_cast<std::size_t>(n));
  while (true) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[source] = source;
    std::queue<int> queue;
    queue.push(source);
    while (!queue.empty() && parent[sink] < 0) {
      const int u = queue.front();
      queue.pop();
      for (int v = 0; v < n; ++v) {
        if (parent[v] < 0 && cap(u, v) > kFlowEps) {
          parent[v] = u;
          queue.push(v);
        }
      }
    }
    if (parent[sink] < 0) break;
    double push = inf;
    for (int v = sink; v != source; v = parent[v]) push = std::min(push, cap(parent[v], v));
    for (int v = sink; v != source; v = parent[v]) {
      cap(parent[v], v) -= push;
      cap(v, parent[v]) += push;
    }
    flow += push;
  }
  const double total = std::min(p0.sum(), p1.sum());
  return flow >= total - 1e-12 * std::max(1.0, total);
}

}  // namespace vgmm
