#include "vgmm/recipes.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "vgmm/errors.hpp"
#include "vgmm/imaging.hpp"
#include "vgmm/model_io.hpp"
#include "vgmm/unbalanced.hpp"
#include "vgmm/vector_gmm_ot.hpp"

namespace vgmm {

namespace {

using nlohmann::json;

constexpr double kMassTol = 1e-9;
constexpr char kGrid1d[] = "-6:6:240";
constexpr char kGrid2d[] = "-6:6:96,-4:4:64";

Gaussian g1(double mean, double var) { return Gaussian::scalar(mean, var); }

Gaussian g2(double x, double y, double var) {
  Vector m(2);
  m << x, y;
  return Gaussian(m, var * Matrix::Identity(2, 2));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double interior_t(int k, int steps) { return static_cast<double>(k) / steps; }

struct VectorRecipe {
  VectorMixtureModel start;
  VectorMixtureModel target;
  double gamma;
  Approach approach;
  const char* grid;
};

// Shared driver for the balanced vector recipes: distance, frames, and the
// checks every recipe gets (mass conservation, endpoint masses).
struct VectorRun {
  TransportResult result;
  std::vector<VectorInterpolant> states;
};

VectorRun run_vector(const VectorRecipe& r, const std::filesystem::path& out, int steps, RecipeReport& report) {
  const auto result = vgmm_distance(r.start, r.target, r.gamma, r.approach);
  if (!result) throw InfeasibleError("infeasible under graph restriction");
  VectorRun run{*result, {}};
  const GridSpec grid = parse_grid(r.grid);
  std::vector<DensityGrid> frames;
  for (int k = 0; k <= steps; ++k) {
    const double t = interior_t(k, steps);
    run.states.push_back(vgmm_interpolate_with_plan(r.start, r.target, result->plan, t, r.approach));
    if (k == 0) frames.push_back(rasterize(r.start, grid));
    else if (k == steps) frames.push_back(rasterize(r.target, grid));
    else frames.push_back(rasterize(run.states.back(), grid));
  }
  write_frames(frames, out);

  double worst = 0.0;
  for (const auto& s : run.states) worst = std::max(worst, std::abs(s.mass() - 1.0));
  report.checks.push_back({"mass conserved", worst <= kMassTol, "max |mass - 1| = " + fmt(worst)});
  const double e0 = (run.states.front().channel_masses() - r.start.channel_masses()).cwiseAbs().maxCoeff();
  const double e1 = (run.states.back().channel_masses() - r.target.channel_masses()).cwiseAbs().maxCoeff();
  report.checks.push_back({"endpoint channel masses", std::max(e0, e1) <= kMassTol,
                           "max deviation " + fmt(std::max(e0, e1))});

  report.summary["approach"] = static_cast<int>(r.approach);
  report.summary["gamma"] = r.gamma;
  report.summary["grid"] = r.grid;
  report.summary["steps"] = steps;
  report.summary["distance"] = result->distance;
  report.summary["plan"] = matrix_to_json(result->plan);
  report.summary["cost"] = matrix_to_json(result->cost);
  return run;
}

// Minimum over interior steps of the mass sitting on `channel`.
double min_interior_mass(const VectorRun& run, int channel) {
  double m = INFINITY;
  for (std::size_t k = 1; k + 1 < run.states.size(); ++k) m = std::min(m, run.states[k].channel_masses()(channel));
  return m;
}

double max_interior_mass(const VectorRun& run, int channel) {
  double m = 0.0;
  for (std::size_t k = 1; k + 1 < run.states.size(); ++k) m = std::max(m, run.states[k].channel_masses()(channel));
  return m;
}

// Plan mass on pairs with equal (same = true) or different channels.
double plan_mass(const VectorMixtureModel& a, const VectorMixtureModel& b, const Matrix& plan, bool same) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j)
      if ((a.components()[i].channel == b.components()[j].channel) == same) total += plan(i, j);
  return total;
}

VectorRecipe two_channel_1d(Approach approach) {
  auto g = std::make_shared<const ChannelGraph>(ChannelGraph::chain(2));
  VectorMixtureModel start(g, {{0.5, g1(-3.0, 1.0), 0}, {0.5, g1(0.0, 0.5), 1}});
  VectorMixtureModel target(g, {{0.3, g1(2.0, 1.0), 0}, {0.7, g1(-1.0, 1.0), 1}});
  return {start, target, 1.0, approach, kGrid1d};
}

VectorRecipe three_channel_1d(ChannelGraph graph) {
  auto g = std::make_shared<const ChannelGraph>(std::move(graph));
  VectorMixtureModel start(g, {{1.0, g1(-3.0, 1.0), 0}});
  VectorMixtureModel target(g, {{0.5, g1(1.0, 0.5), 2}, {0.5, g1(4.0, 0.5), 2}});
  return {start, target, 1.0, Approach::squared, kGrid1d};
}

// Red ball on the left, blue on the right; the target swaps them.
VectorRecipe swap_2d(ChannelGraph graph, double gamma, Approach approach) {
  auto g = std::make_shared<const ChannelGraph>(std::move(graph));
  VectorMixtureModel start(g, {{0.5, g2(-3.0, 0.0, 1.0), 0}, {0.5, g2(3.0, 0.0, 1.0), 2}});
  VectorMixtureModel target(g, {{0.5, g2(3.0, 0.0, 1.0), 0}, {0.5, g2(-3.0, 0.0, 1.0), 2}});
  return {start, target, gamma, approach, kGrid2d};
}

void recipe_two_channel(Approach approach, const std::filesystem::path& out, int steps, RecipeReport& report) {
  const VectorRecipe r = two_channel_1d(approach);
  const VectorRun run = run_vector(r, out, steps, report);
  report.checks.push_back({"finite distance", std::isfinite(run.result.distance), fmt(run.result.distance)});
}

void recipe_three_channel(bool complete, const std::filesystem::path& out, int steps, RecipeReport& report) {
  const VectorRecipe r = three_channel_1d(complete ? ChannelGraph::complete(3) : ChannelGraph::chain(3));
  const VectorRun run = run_vector(r, out, steps, report);
  if (complete) {
    const double m = max_interior_mass(run, 1);
    report.checks.push_back({"channel 2 unused on the complete graph", m == 0.0, "max interior mass " + fmt(m)});
  } else {
    const double m = min_interior_mass(run, 1);
    report.checks.push_back({"mass passes through channel 2", m > 0.0, "min interior mass " + fmt(m)});
  }
}

void recipe_gamma(bool large, const std::filesystem::path& out, int steps, RecipeReport& report) {
  const VectorRecipe r = swap_2d(ChannelGraph::chain(3), large ? 1e6 : 1e-3, Approach::squared);
  const VectorRun run = run_vector(r, out, steps, report);
  const double same = plan_mass(r.start, r.target, run.result.plan, true);
  const double cross = plan_mass(r.start, r.target, run.result.plan, false);
  if (large) {
    report.checks.push_back({"plan keeps each ball in its layer", cross == 0.0, "cross-channel mass " + fmt(cross)});
    const double m = max_interior_mass(run, 1);
    report.checks.push_back({"green layer stays empty", m == 0.0, "max interior mass " + fmt(m)});
  } else {
    report.checks.push_back({"plan swaps layers", same == 0.0, "same-channel mass " + fmt(same)});
    const double m = min_interior_mass(run, 1);
    report.checks.push_back({"mass passes through the green layer", m > 0.0, "min interior mass " + fmt(m)});
  }
}

void recipe_approach0(const std::filesystem::path& out, int steps, RecipeReport& report) {
  const VectorRecipe r = swap_2d(ChannelGraph::complete(3), 1.0, Approach::restricted);
  const VectorRun run = run_vector(r, out, steps, report);
  const double same = plan_mass(r.start, r.target, run.result.plan, true);
  report.checks.push_back({"balls switch layers directly", same == 0.0, "same-channel mass " + fmt(same)});
  const double m = max_interior_mass(run, 1);
  report.checks.push_back({"green layer stays empty", m == 0.0, "max interior mass " + fmt(m)});
}

// Start: two Gaussians of total mass 0.6 on the right. Target: one Gaussian
// of mass 0.6 in the centre plus two small ones on the left that can only
// come from the source layer.
void recipe_unbalanced(const std::filesystem::path& out, int steps, RecipeReport& report) {
  const double gamma = 2.0;
  const MixtureModel start({{0.3, g1(2.0, 0.3)}, {0.3, g1(3.0, 0.3)}});
  const MixtureModel target({{0.6, g1(2.5, 0.6)}, {0.2, g1(-3.0, 0.3)}, {0.2, g1(-2.0, 0.3)}});
  const UnbalancedResult res = unbalanced_gmm_distance(start, target, gamma);

  const GridSpec grid = parse_grid(kGrid1d);
  std::vector<DensityGrid> frames;
  std::vector<UnbalancedSnapshot> snaps;
  for (int k = 0; k <= steps; ++k) {
    snaps.push_back(unbalanced_gmm_interpolate(start, target, gamma, interior_t(k, steps)));
    std::vector<Component> original = snaps.back().original;
    if (k == 0) original = start.components();
    if (k == steps) original = target.components();
    frames.push_back(rasterize_layers({original, snaps.back().source}, 1, grid));
  }
  write_frames(frames, out);

  report.checks.push_back({"source on the start side", res.side == SourceSide::start,
                           "deficit " + fmt(res.deficit)});
  const Matrix& plan = res.transport.plan;
  const double source_to_left = plan.rows() == 3 ? plan(2, 1) + plan(2, 2) : 0.0;
  report.checks.push_back({"left Gaussians come from the source", std::abs(source_to_left - 0.4) <= kMassTol,
                           "source mass to left components " + fmt(source_to_left)});
  const double right_to_centre = plan.rows() == 3 ? plan(0, 0) + plan(1, 0) : 0.0;
  report.checks.push_back({"right Gaussians merge into the centre", std::abs(right_to_centre - 0.6) <= kMassTol,
                           "mass into centre " + fmt(right_to_centre)});
  const double e0 = std::abs(snaps.front().original_mass() - start.mass());
  const double e1 = std::abs(snaps.back().original_mass() - target.mass());
  report.checks.push_back({"endpoint original masses", std::max(e0, e1) <= kMassTol,
                           "max deviation " + fmt(std::max(e0, e1))});
  double worst = 0.0;
  for (const auto& s : snaps) worst = std::max(worst, std::abs(s.original_mass() + s.source_mass() - target.mass()));
  report.checks.push_back({"two-layer mass conserved", worst <= kMassTol, "max deviation " + fmt(worst)});

  report.summary["gamma"] = gamma;
  report.summary["grid"] = kGrid1d;
  report.summary["steps"] = steps;
  report.summary["distance"] = res.transport.distance;
  report.summary["plan"] = matrix_to_json(plan);
  report.summary["cost"] = matrix_to_json(res.transport.cost);
}

using Runner = std::function<void(const std::filesystem::path&, int, RecipeReport&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"fig-1d-2ch-a1", [](auto& o, int s, auto& r) { recipe_two_channel(Approach::additive, o, s, r); }},
      {"fig-1d-2ch-a2", [](auto& o, int s, auto& r) { recipe_two_channel(Approach::squared, o, s, r); }},
      {"fig-1d-3ch-chain", [](auto& o, int s, auto& r) { recipe_three_channel(false, o, s, r); }},
      {"fig-1d-3ch-full", [](auto& o, int s, auto& r) { recipe_three_channel(true, o, s, r); }},
      {"fig-2d-gamma-large", [](auto& o, int s, auto& r) { recipe_gamma(true, o, s, r); }},
      {"fig-2d-gamma-small", [](auto& o, int s, auto& r) { recipe_gamma(false, o, s, r); }},
      {"fig-unbalanced", recipe_unbalanced},
      {"fig-approach0-full", recipe_approach0},
  };
  return table;
}

}  // namespace

bool RecipeReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

json RecipeReport::to_json() const {
  json out = summary;
  out["recipe"] = name;
  json cs = json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  out["checks"] = std::move(cs);
  out["passed"] = passed();
  return out;
}

const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names = {
      "fig-1d-2ch-a1",      "fig-1d-2ch-a2",      "fig-1d-3ch-chain", "fig-1d-3ch-full",
      "fig-2d-gamma-large", "fig-2d-gamma-small", "fig-unbalanced",   "fig-approach0-full",
  };
  return names;
}

RecipeReport run_recipe(const std::string& name, const std::filesystem::path& out_dir, int steps) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw InputError("unknown recipe '" + name + "'");
  if (steps < 2) throw InputError("recipes need at least 2 steps");
  RecipeReport report;
  report.name = name;
  it->second(out_dir, steps, report);
  write_json_file(out_dir / "report.json", report.to_json());
  return report;
}

}  // namespace vgmm
