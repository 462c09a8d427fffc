#include "vgmm/gmm_ot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vgmm/errors.hpp"
#include "vgmm/transport.hpp"

namespace vgmm {

MixtureModel::MixtureModel(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw InputError("mixture must have at least one component");
  const Eigen::Index n = components_.front().gaussian.dim();
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const Component& c = components_[k];
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      std::ostringstream os;
      os << "component " << k << " has non-positive weight " << c.weight;
      throw InputError(os.str());
    }
    if (c.gaussian.dim() != n) {
      std::ostringstream os;
      os << "component " << k << " has dimension " << c.gaussian.dim() << ", expected " << n;
      throw InputError(os.str());
    }
  }
}

double MixtureModel::mass() const {
  double total = 0.0;
  for (const Component& c : components_) total += c.weight;
  return total;
}

Vector MixtureModel::weights() const {
  Vector w(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) w(static_cast<Eigen::Index>(k)) = components_[k].weight;
  return w;
}

bool MixtureModel::is_balanced(double tol) const { return std::abs(mass() - 1.0) <= tol; }

void require_balanced(const MixtureModel& mu, const char* name) {
  if (!mu.is_balanced()) {
    std::ostringstream os;
    os.precision(17);
    os << name << " has total mass " << mu.mass()
       << "; balanced transport needs mass 1 (use the unbalanced variant)";
    throw InputError(os.str());
  }
}

namespace {

std::vector<Component> canonical(const MixtureModel& m, double tol) {
  std::vector<Component> sorted = m.components();
  std::stable_sort(sorted.begin(), sorted.end(), [](const Component& a, const Component& b) {
    return lexicographic_less(a.gaussian, b.gaussian);
  });
  std::vector<Component> merged;
  for (const Component& c : sorted) {
    if (!merged.empty() && approx_equal(merged.back().gaussian, c.gaussian, tol)) {
      merged.back().weight += c.weight;
    } else {
      merged.push_back(c);
    }
  }
  return merged;
}

void require_same_dim(const MixtureModel& a, const MixtureModel& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "mixture dimensions differ: " << a.dim() << " vs " << b.dim();
    throw InputError(os.str());
  }
}

}  // namespace

bool canonically_equal(const MixtureModel& a, const MixtureModel& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const auto ca = canonical(a, tol);
  const auto cb = canonical(b, tol);
  if (ca.size() != cb.size()) return false;
  for (std::size_t k = 0; k < ca.size(); ++k) {
    if (std::abs(ca[k].weight - cb[k].weight) > tol) return false;
    if (!approx_equal(ca[k].gaussian, cb[k].gaussian, tol)) return false;
  }
  return true;
}

Matrix w2_squared_cost(const MixtureModel& mu0, const MixtureModel& mu1) {
  require_same_dim(mu0, mu1);
  Matrix cost(static_cast<Eigen::Index>(mu0.size()), static_cast<Eigen::Index>(mu1.size()));
  for (std::size_t i = 0; i < mu0.size(); ++i)
    for (std::size_t j = 0; j < mu1.size(); ++j)
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          w2_squared_gaussian(mu0.components()[i].gaussian, mu1.components()[j].gaussian);
  return cost;
}

TransportResult gmm_distance(const MixtureModel& mu0, const MixtureModel& mu1) {
  require_balanced(mu0, "mu0");
  require_balanced(mu1, "mu1");
  TransportResult out;
  out.cost = w2_squared_cost(mu0, mu1);
  TransportSolution sol = solve_transport(out.cost, mu0.weights(), mu1.weights());
  out.objective = sol.value;
  out.distance = std::sqrt(std::max(0.0, sol.value));
  out.plan = std::move(sol.coupling.plan);
  return out;
}

MixtureModel gmm_interpolate_with_plan(const MixtureModel& mu0, const MixtureModel& mu1,
                                       const Matrix& plan, double t) {
  require_same_dim(mu0, mu1);
  if (plan.rows() != static_cast<Eigen::Index>(mu0.size()) ||
      plan.cols() != static_cast<Eigen::Index>(mu1.size())) {
    throw InputError("plan shape does not match the mixtures");
  }
  std::vector<Component> out;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (!(plan(i, j) > 0.0)) continue;
      out.push_back({plan(i, j), gaussian_interpolate(mu0.components()[static_cast<std::size_t>(i)].gaussian,
                                                      mu1.components()[static_cast<std::size_t>(j)].gaussian, t)});
    }
  }
  return MixtureModel(std::move(out));
}

MixtureModel gmm_interpolate(const MixtureModel& mu0, const MixtureModel& mu1, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("interpolation time outside [0, 1]");
  const TransportResult r = gmm_distance(mu0, mu1);
  return gmm_interpolate_with_plan(mu0, mu1, r.plan, t);
}

}  // namespace vgmm
