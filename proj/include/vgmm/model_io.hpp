#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "vgmm/errors.hpp"
#include "vgmm/gmm_ot.hpp"
#include "vgmm/vector_gmm_ot.hpp"

namespace vgmm {

/// Schema violation; the message starts with the offending field path,
/// e.g. "components[2].weight: missing field".
class SchemaError : public InputError {
 public:
  SchemaError(const std::string& path, const std::string& problem) : InputError(path + ": " + problem) {}
};

using AnyModel = std::variant<MixtureModel, VectorMixtureModel>;

enum class MassMode {
  balanced,    // component weights must sum to 1 within 1e-9
  unbalanced,  // any positive total
};

nlohmann::json graph_to_json(const ChannelGraph& g);
ChannelGraph graph_from_json(const nlohmann::json& j, const std::string& path = "graph");

/// [{"weight", "mean", "cov"}, ...]; accepts an empty list.
nlohmann::json components_to_json(const std::vector<Component>& comps);
nlohmann::json to_json(const MixtureModel& m);
nlohmann::json to_json(const VectorMixtureModel& m);
nlohmann::json to_json(const AnyModel& m);
/// Interpolants carry {"position": {"from", "to", "fraction"}} per component.
nlohmann::json to_json(const VectorInterpolant& m);

AnyModel model_from_json(const nlohmann::json& j, MassMode mode);
VectorInterpolant interpolant_from_json(const nlohmann::json& j);

/// Writes pretty-printed JSON; doubles use shortest round-trip notation, so
/// load_model(save_model(m)) reproduces every coefficient exactly.
void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path, MassMode mode);

/// Reads and parses a JSON file, mapping I/O and syntax failures to InputError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace vgmm
