#include "vgmm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "vgmm/errors.hpp"

namespace vgmm {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

Vector vector_field(const json& j, Eigen::Index n, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (static_cast<Eigen::Index>(j.size()) != n) {
    throw SchemaError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_field(const json& j, Eigen::Index n, const std::string& path) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw SchemaError(path, "expected " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.row(i) = vector_field(j[static_cast<std::size_t>(i)], n, path + "[" + std::to_string(i) + "]").transpose();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json gaussian_fields(double weight, const Gaussian& g) {
  json c;
  c["weight"] = weight;
  c["mean"] = vector_to_json(g.mean());
  c["cov"] = matrix_to_json(g.covariance());
  return c;
}

struct RawComponent {
  double weight;
  Gaussian gaussian;
  const json* node;
  std::string path;
};

std::vector<RawComponent> parse_components(const json& j, Eigen::Index dim) {
  const json& list = field(j, "components", "$");
  if (!list.is_array()) throw SchemaError("components", "expected an array");
  if (list.empty()) throw SchemaError("components", "must contain at least one component");
  std::vector<RawComponent> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string path = "components[" + std::to_string(k) + "]";
    const json& c = list[k];
    const double weight = number(field(c, "weight", path), path + ".weight");
    if (!(weight > 0.0)) throw SchemaError(path + ".weight", "must be > 0");
    Vector mean = vector_field(field(c, "mean", path), dim, path + ".mean");
    Matrix cov = matrix_field(field(c, "cov", path), dim, path + ".cov");
    try {
      out.push_back({weight, Gaussian(std::move(mean), std::move(cov)), &c, path});
    } catch (const InputError& e) {
      throw SchemaError(path, e.what());
    }
  }
  return out;
}

Eigen::Index parse_dim(const json& j) {
  const int dim = integer(field(j, "dim", "$"), "dim");
  if (dim <= 0) throw SchemaError("dim", "must be positive");
  return dim;
}

void check_mass(double mass, MassMode mode) {
  if (mode == MassMode::balanced && std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << mass << " but balanced models need total mass 1";
    throw SchemaError("components[*].weight", os.str());
  }
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

json graph_to_json(const ChannelGraph& g) {
  json out;
  out["nodes"] = g.node_count();
  json edges = json::array();
  for (const auto& [u, w] : g.edges()) edges.push_back({u, w});
  out["edges"] = std::move(edges);
  if (!g.has_uniform_lengths()) out["lengths"] = g.lengths();
  return out;
}

ChannelGraph graph_from_json(const json& j, const std::string& path) {
  const int nodes = integer(field(j, "nodes", path), path + ".nodes");
  const json& edges_json = field(j, "edges", path);
  if (!edges_json.is_array()) throw SchemaError(path + ".edges", "expected an array");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t e = 0; e < edges_json.size(); ++e) {
    const std::string ep = path + ".edges[" + std::to_string(e) + "]";
    const json& pair = edges_json[e];
    if (!pair.is_array() || pair.size() != 2) throw SchemaError(ep, "expected [u, w]");
    edges.emplace_back(integer(pair[0], ep + "[0]"), integer(pair[1], ep + "[1]"));
  }
  std::vector<double> lengths;
  if (auto it = j.find("lengths"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError(path + ".lengths", "expected an array");
    for (std::size_t e = 0; e < it->size(); ++e)
      lengths.push_back(number((*it)[e], path + ".lengths[" + std::to_string(e) + "]"));
  }
  try {
    return ChannelGraph(nodes, std::move(edges), std::move(lengths));
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError(path, e.what());
  }
}

json components_to_json(const std::vector<Component>& comps) {
  json out = json::array();
  for (const Component& c : comps) out.push_back(gaussian_fields(c.weight, c.gaussian));
  return out;
}

json to_json(const MixtureModel& m) {
  json out;
  out["type"] = "gmm";
  out["dim"] = m.dim();
  out["graph"] = nullptr;
  out["components"] = components_to_json(m.components());
  return out;
}

json to_json(const VectorMixtureModel& m) {
  json out;
  out["type"] = "vgmm";
  out["dim"] = m.dim();
  out["graph"] = graph_to_json(m.graph());
  json comps = json::array();
  for (const VectorComponent& c : m.components()) {
    json item = gaussian_fields(c.weight, c.gaussian);
    item["channel"] = c.channel;
    comps.push_back(std::move(item));
  }
  out["components"] = std::move(comps);
  return out;
}

json to_json(const AnyModel& m) {
  return std::visit([](const auto& model) { return to_json(model); }, m);
}

json to_json(const VectorInterpolant& m) {
  json out;
  out["type"] = "vgmm_interpolant";
  out["dim"] = m.dim();
  out["graph"] = graph_to_json(m.graph());
  json comps = json::array();
  for (const PlacedComponent& c : m.components()) {
    json item = gaussian_fields(c.weight, c.gaussian);
    item["position"] = {{"from", c.position.node_a}, {"to", c.position.node_b}, {"fraction", c.position.fraction}};
    comps.push_back(std::move(item));
  }
  out["components"] = std::move(comps);
  return out;
}

AnyModel model_from_json(const json& j, MassMode mode) {
  const json& type_json = field(j, "type", "$");
  if (!type_json.is_string()) throw SchemaError("type", "expected \"gmm\" or \"vgmm\"");
  const std::string type = type_json.get<std::string>();
  const Eigen::Index dim = parse_dim(j);
  if (type == "gmm") {
    std::vector<Component> comps;
    double mass = 0.0;
    for (RawComponent& c : parse_components(j, dim)) {
      if (auto it = c.node->find("channel"); it != c.node->end() && !it->is_null() &&
                                             integer(*it, c.path + ".channel") != 0) {
        throw SchemaError(c.path + ".channel", "scalar mixtures only have channel 0");
      }
      mass += c.weight;
      comps.push_back({c.weight, std::move(c.gaussian)});
    }
    check_mass(mass, mode);
    return MixtureModel(std::move(comps));
  }
  if (type == "vgmm") {
    const json& graph_json = field(j, "graph", "$");
    if (graph_json.is_null()) throw SchemaError("graph", "vector mixtures need a graph");
    auto graph = std::make_shared<const ChannelGraph>(graph_from_json(graph_json));
    std::vector<VectorComponent> comps;
    double mass = 0.0;
    for (RawComponent& c : parse_components(j, dim)) {
      const int channel = integer(field(*c.node, "channel", c.path), c.path + ".channel");
      if (channel < 0 || channel >= graph->node_count()) {
        throw SchemaError(c.path + ".channel", "outside 0.." + std::to_string(graph->node_count() - 1));
      }
      mass += c.weight;
      comps.push_back({c.weight, std::move(c.gaussian), channel});
    }
    check_mass(mass, mode);
    return VectorMixtureModel(std::move(graph), std::move(comps));
  }
  throw SchemaError("type", "expected \"gmm\" or \"vgmm\", got \"" + type + "\"");
}

VectorInterpolant interpolant_from_json(const json& j) {
  const json& type_json = field(j, "type", "$");
  if (!type_json.is_string() || type_json.get<std::string>() != "vgmm_interpolant") {
    throw SchemaError("type", "expected \"vgmm_interpolant\"");
  }
  const Eigen::Index dim = parse_dim(j);
  auto graph = std::make_shared<const ChannelGraph>(graph_from_json(field(j, "graph", "$")));
  std::vector<PlacedComponent> comps;
  for (RawComponent& c : parse_components(j, dim)) {
    const json& pos = field(*c.node, "position", c.path);
    const std::string pp = c.path + ".position";
    GraphPosition p{integer(field(pos, "from", pp), pp + ".from"), integer(field(pos, "to", pp), pp + ".to"),
                    number(field(pos, "fraction", pp), pp + ".fraction")};
    comps.push_back({c.weight, std::move(c.gaussian), p});
  }
  try {
    return VectorInterpolant(std::move(graph), std::move(comps));
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError("components", e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

void save_model(const std::filesystem::path& path, const AnyModel& model) { write_json_file(path, to_json(model)); }

AnyModel load_model(const std::filesystem::path& path, MassMode mode) {
  return model_from_json(read_json_file(path), mode);
}

}  // namespace vgmm
