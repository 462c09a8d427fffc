#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vgmm {

struct RecipeCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct RecipeReport {
  std::string name;
  std::vector<RecipeCheck> checks;
  nlohmann::json summary;  // parameters, distance and plan

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Names accepted by run_recipe, in a fixed order.
const std::vector<std::string>& recipe_names();

/// Runs a figure recipe: writes frame_###.ppm and report.json into `out_dir`
/// and returns the report. Throws InputError for unknown names.
RecipeReport run_recipe(const std::string& name, const std::filesystem::path& out_dir, int steps = 10);

}  // namespace vgmm
