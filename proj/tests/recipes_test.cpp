#include <doctest.h>

#include <fstream>

#include "test_support.hpp"
#include "vgmm/errors.hpp"
#include "vgmm/model_io.hpp"
#include "vgmm/recipes.hpp"

using namespace vgmm;

TEST_CASE("every recipe passes its qualitative checks") {
  for (const std::string& name : recipe_names()) {
    CAPTURE(name);
    const auto dir = testing::scratch_dir(name);
    const RecipeReport r = run_recipe(name, dir, 10);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CAPTURE(c.detail);
      CHECK(c.passed);
    }
    CHECK(std::filesystem::exists(dir / "frame_010.ppm"));
    CHECK_FALSE(std::filesystem::exists(dir / "frame_011.ppm"));
    const auto report = read_json_file(dir / "report.json");
    CHECK(report["recipe"] == name);
    CHECK(report["passed"] == true);
  }
}

TEST_CASE("unknown recipe") {
  CHECK_THROWS_AS(run_recipe("fig-nope", testing::scratch_dir("nope")), InputError);
}
