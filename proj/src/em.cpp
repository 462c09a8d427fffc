#include "vgmm/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "vgmm/errors.hpp"

namespace vgmm {

namespace {

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ComponentCache {
  Eigen::LLT<Matrix> llt;
  double log_norm;  // log(pi_k) - log|S|/2 - n/2 log(2 pi)
};

std::vector<ComponentCache> prepare(const MixtureModel& model) {
  std::vector<ComponentCache> out;
  const double n = static_cast<double>(model.dim());
  for (const Component& c : model.components()) {
    ComponentCache cache{Eigen::LLT<Matrix>(c.gaussian.covariance()), 0.0};
    if (cache.llt.info() != Eigen::Success) throw NumericalError("covariance Cholesky factorization failed");
    double log_det = 0.0;
    const Matrix& l = cache.llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    cache.log_norm = std::log(c.weight) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
    out.push_back(std::move(cache));
  }
  return out;
}

// Log joint densities log(pi_k N(x_i)) into `logp` (n x k); returns the
// weighted log-likelihood.
double e_step(const WeightedSamples& data, const MixtureModel& model, Matrix& logp) {
  const auto caches = prepare(model);
  const Eigen::Index n = data.size();
  const auto k = static_cast<Eigen::Index>(model.size());
  logp.resize(n, k);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = data.points.row(i).transpose();
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c) {
      const Vector z = caches[static_cast<std::size_t>(c)].llt.matrixL().solve(
          x - model.components()[static_cast<std::size_t>(c)].gaussian.mean());
      logp(i, c) = caches[static_cast<std::size_t>(c)].log_norm - 0.5 * z.squaredNorm();
      best = std::max(best, logp(i, c));
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) sum += std::exp(logp(i, c) - best);
    const double log_mix = best + std::log(sum);
    for (Eigen::Index c = 0; c < k; ++c) logp(i, c) = std::exp(logp(i, c) - log_mix);
    ll += data.weights(i) * log_mix;
  }
  return ll;
}

// Maximizer of the expected complete-data log-likelihood over covariances
// with eigenvalues >= floor: clip the scatter matrix's spectrum.
Matrix floor_spectrum(const Matrix& scatter, double floor) {
  SymEig eig = sym_eig(0.5 * (scatter + scatter.transpose()));
  bool clipped = false;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < floor) {
      eig.values(i) = floor;
      clipped = true;
    }
  }
  if (!clipped) return 0.5 * (scatter + scatter.transpose());
  Matrix out = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

MixtureModel m_step(const WeightedSamples& data, const Matrix& resp, double floor) {
  const auto k = resp.cols();
  const Eigen::Index dim = data.dim();
  const double total = data.total_weight();
  std::vector<Component> comps;
  for (Eigen::Index c = 0; c < k; ++c) {
    const Vector w = data.weights.cwiseProduct(resp.col(c));
    const double mass = w.sum();
    if (!(mass > 0.0)) throw NumericalError("EM component " + std::to_string(c) + " lost all of its mass");
    Vector mean = (data.points.transpose() * w) / mass;
    Matrix centred = data.points.rowwise() - mean.transpose();
    Matrix scatter = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (w(i) == 0.0) continue;
      scatter.noalias() += w(i) * centred.row(i).transpose() * centred.row(i);
    }
    scatter /= mass;
    comps.push_back({mass / total, Gaussian(std::move(mean), floor_spectrum(scatter, floor))});
  }
  return MixtureModel(std::move(comps));
}

std::size_t count_distinct(const WeightedSamples& data) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (data.weights(i) <= 0.0) continue;
    const Vector row = data.points.row(i).transpose();
    seen.insert(std::vector<double>(row.data(), row.data() + row.size()));
  }
  return seen.size();
}

// Weighted k-means++ seeding followed by one hard assignment.
Matrix initial_responsibilities(const WeightedSamples& data, int k, std::mt19937_64& rng) {
  const Eigen::Index n = data.size();
  std::vector<Eigen::Index> centres;
  Vector d2 = Vector::Constant(n, 1.0);
  for (int c = 0; c < k; ++c) {
    const Vector score = data.weights.cwiseProduct(d2);
    const double total = score.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (score(i) <= 0.0) continue;
        acc += score(i);
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick < 0) throw NumericalError("k-means++ seeding ran out of distinct points");
    centres.push_back(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (data.points.row(i) - data.points.row(pick)).squaredNorm();
      d2(i) = c == 0 ? dist : std::min(d2(i), dist);
    }
  }
  Matrix resp = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double dist = (data.points.row(i) - data.points.row(centres[static_cast<std::size_t>(c)])).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    resp(i, best) = 1.0;
  }
  return resp;
}

}  // namespace

void validate(const WeightedSamples& data) {
  if (data.points.rows() != data.weights.size()) {
    std::ostringstream os;
    os << data.points.rows() << " points but " << data.weights.size() << " weights";
    throw InputError(os.str());
  }
  if (data.size() == 0 || data.dim() == 0) throw InputError("sample set is empty");
  if (!data.points.allFinite()) throw InputError("sample coordinates must be finite");
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (!(data.weights(i) >= 0.0) || !std::isfinite(data.weights(i))) {
      throw InputError("sample weight " + std::to_string(i) + " is negative or non-finite");
    }
  }
  if (!(data.total_weight() > 0.0)) throw InputError("samples carry zero total mass");
}

double default_jitter(const WeightedSamples& data) {
  double range = 0.0;
  for (Eigen::Index d = 0; d < data.dim(); ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (data.weights(i) <= 0.0) continue;
      lo = std::min(lo, data.points(i, d));
      hi = std::max(hi, data.points(i, d));
    }
    if (hi > lo) range = std::max(range, hi - lo);
  }
  return range > 0.0 ? 1e-6 * range * range : 1e-6;
}

double weighted_log_likelihood(const WeightedSamples& data, const MixtureModel& model) {
  validate(data);
  Matrix scratch;
  return e_step(data, model, scratch);
}

Matrix responsibilities(const WeightedSamples& data, const MixtureModel& model) {
  validate(data);
  Matrix resp;
  e_step(data, model, resp);
  return resp;
}

EmFit fit_gmm_em(const WeightedSamples& input, int k, const EmOptions& opts) {
  validate(input);
  if (k <= 0) throw InputError("component count must be positive");
  if (opts.max_iter < 0) throw InputError("max_iter must be >= 0");

  // Zero-weight samples contribute nothing; drop them up front.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < input.size(); ++i)
    if (input.weights(i) > 0.0) keep.push_back(i);
  WeightedSamples data{Matrix(static_cast<Eigen::Index>(keep.size()), input.dim()),
                       Vector(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    data.points.row(static_cast<Eigen::Index>(r)) = input.points.row(keep[r]);
    data.weights(static_cast<Eigen::Index>(r)) = input.weights(keep[r]);
  }

  const std::size_t distinct = count_distinct(data);
  if (static_cast<std::size_t>(k) > distinct) {
    std::ostringstream os;
    os << "cannot fit " << k << " components to " << distinct << " distinct points";
    throw InputError(os.str());
  }
  const double floor = opts.jitter.value_or(default_jitter(data));
  if (!(floor > 0.0)) throw InputError("jitter must be positive");

  std::mt19937_64 rng(opts.seed);
  Matrix resp = initial_responsibilities(data, k, rng);
  MixtureModel model = m_step(data, resp, floor);

  EmFit fit{model, {}, 0, false};
  double ll = e_step(data, model, resp);
  fit.log_likelihood.push_back(ll);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    model = m_step(data, resp, floor);
    const double next = e_step(data, model, resp);
    fit.log_likelihood.push_back(next);
    fit.iterations = iter + 1;
    const bool done = std::abs(next - ll) <= opts.tol * std::max(1.0, std::abs(next));
    ll = next;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.model = std::move(model);
  return fit;
}

}  // namespace vgmm
