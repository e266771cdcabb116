#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "wlab/catalog.hpp"
#include "wlab/rigidity.hpp"

namespace wlab {

/// Resolved experiment configuration. Validated against the documented
/// schema; unknown keys are rejected with their field path. The resolved
/// form (defaults filled) is echoed into every output artifact.
struct ExperimentConfig {
  std::string command;  // catalog | energy | ledger | invert | align | sweep | verify-all
  CatalogSpec surface;
  std::array<int, 2> grid{256, 256};
  OptimizerConfig optimizer;
  std::string model;    // align: inverted_catenoid | inverted_enneper | inverted_chen
  std::string family;   // sweep: round_sphere | inverted_catenoid
  std::vector<double> epsilons;
  std::string invert = "none";  // ledger/invert: "auto" | "x,y,z[,w]" | "none"
  std::string output;
  int workers = 1;
  std::map<std::string, double> tolerance_overrides;

  nlohmann::json resolved() const;  // full echo, defaults filled
};

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& source);
/// JSON or TOML by extension. The TOML reader covers the flat subset the
/// schema needs: [tables], key = value with strings, numbers, booleans and
/// arrays, '#' comments.
ExperimentConfig load_config(const std::string& path);

nlohmann::json toml_subset_to_json(const std::string& text, const std::string& source);

}  // namespace wlab
