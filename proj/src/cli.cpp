#include "vgmm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vgmm/em.hpp"
#include "vgmm/errors.hpp"
#include "vgmm/imaging.hpp"
#include "vgmm/model_io.hpp"
#include "vgmm/recipes.hpp"
#include "vgmm/unbalanced.hpp"
#include "vgmm/vector_gmm_ot.hpp"

namespace vgmm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kDefaultCells2d = 64;
constexpr int kDefaultCells1d = 256;

struct RunConfig {
  std::vector<std::string> inputs;
  std::string recipe;
  int approach = 2;
  double gamma = 1.0;
  std::optional<double> gamma_source;
  int steps = 10;
  bool unbalanced = false;
  bool fit = false;
  int k = 10;
  std::uint64_t seed = 0;
  std::string grid;
  std::string out = "vgmm-out";

  double source_price() const { return gamma_source.value_or(gamma); }
  MassMode mass_mode() const { return unbalanced ? MassMode::unbalanced : MassMode::balanced; }
};

struct Input {
  AnyModel model;
  std::optional<GridSpec> image_grid;  // pixel extent when the input was an image
};

VectorMixtureModel fit_image(const Image& image, int k, std::uint64_t seed, bool unbalanced) {
  const ChannelSamples samples = image_to_channels(image);
  const int m = static_cast<int>(samples.channels.size());
  auto graph = std::make_shared<const ChannelGraph>(m == 3 ? ChannelGraph::chain(3) : ChannelGraph::single());
  const double scale = unbalanced ? 1.0 : samples.masses.sum();
  std::vector<VectorComponent> comps;
  for (int c = 0; c < m; ++c) {
    if (samples.masses(c) <= 0.0) continue;
    EmOptions opts;
    opts.seed = seed + static_cast<std::uint64_t>(c);
    const EmFit fit = fit_gmm_em(samples.channels[static_cast<std::size_t>(c)], k, opts);
    for (const Component& comp : fit.model.components())
      comps.push_back({comp.weight * samples.masses(c) / scale, comp.gaussian, c});
  }
  return VectorMixtureModel(graph, std::move(comps));
}

GridSpec image_extent(const Image& image) {
  return GridSpec{{0.0, 0.0},
                  {static_cast<double>(image.width), static_cast<double>(image.height)},
                  {image.width, image.height}};
}

Input load_input(const std::string& path, const RunConfig& cfg) {
  if (cfg.fit) {
    const Image image = read_image(path);
    return {fit_image(image, cfg.k, cfg.seed, cfg.unbalanced), image_extent(image)};
  }
  return {load_model(path, cfg.mass_mode()), std::nullopt};
}

// Bounding box of mean +- 4 standard deviations over all components.
template <class Comps>
GridSpec default_grid(const Comps& comps, Eigen::Index dim) {
  if (dim != 1 && dim != 2) throw InputError("rendering supports 1D and 2D models only");
  GridSpec g;
  for (Eigen::Index a = 0; a < dim; ++a) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : comps) {
      const double s = 4.0 * std::sqrt(c.gaussian.covariance()(a, a));
      lo = std::min(lo, c.gaussian.mean()(a) - s);
      hi = std::max(hi, c.gaussian.mean()(a) + s);
    }
    g.lo.push_back(lo);
    g.hi.push_back(hi);
    g.count.push_back(dim == 1 ? kDefaultCells1d : kDefaultCells2d);
  }
  return g;
}

GridSpec merge_grids(const GridSpec& a, const GridSpec& b) {
  GridSpec g = a;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    g.lo[i] = std::min(a.lo[i], b.lo[i]);
    g.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return g;
}

GridSpec grid_for(const RunConfig& cfg, const Input& a, const Input& b) {
  if (!cfg.grid.empty()) return parse_grid(cfg.grid);
  if (a.image_grid) return *a.image_grid;
  const auto extent = [](const AnyModel& m) {
    return std::visit([](const auto& x) { return default_grid(x.components(), x.dim()); }, m);
  };
  return merge_grids(extent(a.model), extent(b.model));
}

json transport_json(const TransportResult& r) {
  return {{"distance", r.distance}, {"objective", r.objective}, {"plan", matrix_to_json(r.plan)},
          {"cost", matrix_to_json(r.cost)}};
}

json unbalanced_json(const UnbalancedResult& r) {
  json j = transport_json(r.transport);
  j["source_side"] = r.side == SourceSide::none ? "none" : r.side == SourceSide::start ? "start" : "target";
  j["deficit"] = r.deficit;
  return j;
}

void require_same_kind(const Input& a, const Input& b) {
  if (a.model.index() != b.model.index()) throw InputError("both inputs must be scalar (gmm) or both vector (vgmm)");
}

Approach approach_of(const RunConfig& cfg) {
  const Approach a = parse_approach(cfg.approach);
  if (cfg.unbalanced && a != Approach::squared) throw InputError("--unbalanced supports approach 2 only");
  return a;
}

TransportResult balanced_vector(const VectorMixtureModel& a, const VectorMixtureModel& b, const RunConfig& cfg) {
  const auto r = vgmm_distance(a, b, cfg.gamma, approach_of(cfg));
  if (!r) throw InfeasibleError("infeasible under graph restriction");
  return *r;
}

void emit(const json& j, std::ostream& out) { out << j.dump(2) << '\n'; }

int cmd_distance(const RunConfig& cfg, std::ostream& out) {
  const Input a = load_input(cfg.inputs[0], cfg);
  const Input b = load_input(cfg.inputs[1], cfg);
  require_same_kind(a, b);
  json result;
  if (const auto* mu0 = std::get_if<MixtureModel>(&a.model)) {
    const auto& mu1 = std::get<MixtureModel>(b.model);
    if (cfg.unbalanced) {
      result = unbalanced_json(unbalanced_gmm_distance(*mu0, mu1, cfg.source_price()));
    } else {
      require_balanced(*mu0, "first input");
      require_balanced(mu1, "second input");
      result = transport_json(gmm_distance(*mu0, mu1));
    }
  } else {
    const auto& rho0 = std::get<VectorMixtureModel>(a.model);
    const auto& rho1 = std::get<VectorMixtureModel>(b.model);
    if (cfg.unbalanced) {
      approach_of(cfg);
      result = unbalanced_json(unbalanced_vgmm_distance(rho0, rho1, cfg.gamma, cfg.source_price()));
    } else {
      result = transport_json(balanced_vector(rho0, rho1, cfg));
    }
    result["approach"] = cfg.approach;
    result["gamma"] = cfg.gamma;
  }
  fs::create_directories(cfg.out);
  write_json_file(fs::path(cfg.out) / "distance.json", result);
  emit(result, out);
  return kExitOk;
}

std::string step_name(int k) {
  char name[32];
  std::snprintf(name, sizeof(name), "step_%03d.json", k);
  return name;
}

json with_t(json j, double t) {
  j["t"] = t;
  return j;
}

// Start-side components of an unbalanced interpolant at an endpoint: the input
// components on their own channels plus whatever sits on the source channel.
VectorInterpolant endpoint_state(const VectorMixtureModel& input, const UnbalancedInterpolant& state) {
  std::vector<PlacedComponent> comps;
  for (const auto& c : input.components()) comps.push_back({c.weight, c.gaussian, GraphPosition::node(c.channel)});
  for (const auto& c : state.state.components())
    if (c.position == GraphPosition::node(state.source_channel)) comps.push_back(c);
  return VectorInterpolant(state.state.graph_ptr(), std::move(comps));
}

int cmd_interpolate(const RunConfig& cfg, std::ostream& out) {
  const Input a = load_input(cfg.inputs[0], cfg);
  const Input b = load_input(cfg.inputs[1], cfg);
  require_same_kind(a, b);
  const GridSpec grid = grid_for(cfg, a, b);
  const fs::path dir(cfg.out);
  fs::create_directories(dir);

  std::vector<DensityGrid> frames;
  json summary;
  const auto t_of = [&](int k) { return static_cast<double>(k) / cfg.steps; };
  const auto write_step = [&](int k, const json& j) { write_json_file(dir / step_name(k), with_t(j, t_of(k))); };

  if (const auto* mu0 = std::get_if<MixtureModel>(&a.model)) {
    const auto& mu1 = std::get<MixtureModel>(b.model);
    if (cfg.unbalanced) {
      const UnbalancedResult r = unbalanced_gmm_distance(*mu0, mu1, cfg.source_price());
      summary = unbalanced_json(r);
      for (int k = 0; k <= cfg.steps; ++k) {
        const UnbalancedSnapshot s = unbalanced_gmm_interpolate(*mu0, mu1, cfg.source_price(), t_of(k));
        const auto& original = k == 0 ? mu0->components() : k == cfg.steps ? mu1.components() : s.original;
        frames.push_back(rasterize_layers({original, s.source}, mu0->dim(), grid));
        write_step(k, {{"type", "unbalanced_snapshot"},
                       {"original", components_to_json(s.original)},
                       {"source", components_to_json(s.source)}});
      }
    } else {
      require_balanced(*mu0, "first input");
      require_balanced(mu1, "second input");
      const TransportResult r = gmm_distance(*mu0, mu1);
      summary = transport_json(r);
      for (int k = 0; k <= cfg.steps; ++k) {
        const MixtureModel s = gmm_interpolate_with_plan(*mu0, mu1, r.plan, t_of(k));
        frames.push_back(rasterize(k == 0 ? *mu0 : k == cfg.steps ? mu1 : s, grid));
        write_step(k, to_json(s));
      }
    }
  } else {
    const auto& rho0 = std::get<VectorMixtureModel>(a.model);
    const auto& rho1 = std::get<VectorMixtureModel>(b.model);
    const Approach approach = approach_of(cfg);
    if (cfg.unbalanced) {
      summary = unbalanced_json(unbalanced_vgmm_distance(rho0, rho1, cfg.gamma, cfg.source_price()));
      for (int k = 0; k <= cfg.steps; ++k) {
        const UnbalancedInterpolant s = unbalanced_vgmm_interpolate(rho0, rho1, cfg.gamma, cfg.source_price(), t_of(k));
        const VectorInterpolant shown =
            k == 0 ? endpoint_state(rho0, s) : k == cfg.steps ? endpoint_state(rho1, s) : s.state;
        frames.push_back(rasterize(shown, grid));
        json j = to_json(s.state);
        j["source_channel"] = s.source_channel;
        write_step(k, j);
      }
    } else {
      const TransportResult r = balanced_vector(rho0, rho1, cfg);
      summary = transport_json(r);
      for (int k = 0; k <= cfg.steps; ++k) {
        const VectorInterpolant s = vgmm_interpolate_with_plan(rho0, rho1, r.plan, t_of(k), approach);
        frames.push_back(k == 0 ? rasterize(rho0, grid) : k == cfg.steps ? rasterize(rho1, grid) : rasterize(s, grid));
        write_step(k, to_json(s));
      }
    }
    summary["approach"] = cfg.approach;
    summary["gamma"] = cfg.gamma;
  }
  write_frames(frames, dir);
  summary["frames"] = frames.size();
  summary["steps"] = cfg.steps;
  write_json_file(dir / "distance.json", summary);
  emit(summary, out);
  return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const Image image = read_image(cfg.inputs[0]);
  const VectorMixtureModel model = fit_image(image, cfg.k, cfg.seed, cfg.unbalanced);
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  save_model(dir / "model.json", AnyModel(model));
  emit({{"model", (dir / "model.json").string()},
        {"components", model.size()},
        {"channel_masses", matrix_to_json(model.channel_masses().transpose())}},
       out);
  return kExitOk;
}

int cmd_render(const RunConfig& cfg, std::ostream& out) {
  const json j = read_json_file(cfg.inputs[0]);
  const fs::path dir(cfg.out);
  DensityGrid frame;
  if (j.is_object() && j.value("type", "") == "vgmm_interpolant") {
    const VectorInterpolant m = interpolant_from_json(j);
    frame = rasterize(m, cfg.grid.empty() ? default_grid(m.components(), m.dim()) : parse_grid(cfg.grid));
  } else {
    const AnyModel m = model_from_json(j, MassMode::unbalanced);
    const GridSpec grid = cfg.grid.empty()
                              ? std::visit([](const auto& x) { return default_grid(x.components(), x.dim()); }, m)
                              : parse_grid(cfg.grid);
    frame = std::visit([&](const auto& x) { return rasterize(x, grid); }, m);
  }
  const auto paths = write_frames({frame}, dir);
  emit({{"frame", paths.front().string()}, {"max_density", frame.max_value()}}, out);
  return kExitOk;
}

int cmd_repro(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const RecipeReport report = run_recipe(cfg.recipe, cfg.out, cfg.steps);
  emit(report.to_json(), out);
  if (report.passed()) return kExitOk;
  for (const auto& c : report.checks)
    if (!c.passed) err << "check failed: " << c.name << " (" << c.detail << ")\n";
  return kExitNumerical;
}

void add_model_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--approach", cfg.approach, "vector construction: 0 restricted, 1 additive, 2 squared")
      ->check(CLI::IsMember({0, 1, 2}));
  sub->add_option("--gamma", cfg.gamma, "price of moving mass between channels")->check(CLI::NonNegativeNumber);
  sub->add_option("--gamma-source", cfg.gamma_source, "price of creating or destroying mass (default: gamma)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--unbalanced", cfg.unbalanced, "allow inputs of different total mass");
  sub->add_flag("--fit", cfg.fit, "inputs are images; fit a mixture to each first");
  sub->add_option("--k", cfg.k, "components per channel when fitting")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "random seed for fitting");
  sub->add_option("--out", cfg.out, "output directory");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Optimal transport between scalar, vector and unbalanced Gaussian mixtures", "vgmm-ot"};
  app.require_subcommand(1);

  auto* distance = app.add_subcommand("distance", "distance and optimal plan between two models");
  distance->add_option("inputs", cfg.inputs, "two model JSON files (or images with --fit)")->expected(2)->required();
  add_model_flags(distance, cfg);

  auto* interpolate = app.add_subcommand("interpolate", "displacement interpolation frames");
  interpolate->add_option("inputs", cfg.inputs, "two model JSON files (or images with --fit)")->expected(2)->required();
  add_model_flags(interpolate, cfg);
  interpolate->add_option("--steps", cfg.steps, "number of steps; writes steps + 1 frames")
      ->check(CLI::PositiveNumber);
  interpolate->add_option("--grid", cfg.grid, "sampling grid x0:x1:nx[,y0:y1:ny]");

  auto* fit = app.add_subcommand("fit", "fit a vector mixture to an image");
  fit->add_option("image", cfg.inputs, "PPM/PGM or PNG image")->expected(1)->required();
  fit->add_option("--k", cfg.k, "components per channel")->check(CLI::PositiveNumber);
  fit->add_option("--seed", cfg.seed, "random seed");
  fit->add_flag("--unbalanced", cfg.unbalanced, "keep raw intensity mass instead of normalizing");
  fit->add_option("--out", cfg.out, "output directory");

  auto* render = app.add_subcommand("render", "rasterize one model to frame_000.ppm");
  render->add_option("model", cfg.inputs, "model or interpolant JSON")->expected(1)->required();
  render->add_option("--grid", cfg.grid, "sampling grid x0:x1:nx[,y0:y1:ny]");
  render->add_option("--out", cfg.out, "output directory");

  auto* repro = app.add_subcommand("repro", "run a figure recipe");
  repro->add_option("name", cfg.recipe, "recipe name")->required()->check(CLI::IsMember(recipe_names()));
  repro->add_option("--steps", cfg.steps, "number of steps")->check(CLI::Range(2, 1000));
  repro->add_option("--out", cfg.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*distance) return cmd_distance(cfg, out);
    if (*interpolate) return cmd_interpolate(cfg, out);
    if (*fit) return cmd_fit(cfg, out);
    if (*render) return cmd_render(cfg, out);
    return cmd_repro(cfg, out, err);
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace vgmm
