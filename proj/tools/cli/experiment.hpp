#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcflex/grid/io.hpp"
#include "dcflex/grid/synth.hpp"
#include "dcflex/management/management.hpp"

namespace dcflex::cli {

enum class Method { kEven, kOpt };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  // grid.json; profiles.csv and scenarios.csv are read from the same folder.
  // Without it a synthetic grid is generated from `synth`.
  std::optional<std::filesystem::path> grid;
  grid::SynthOptions synth;
  std::uint64_t seed = 1;
  double train_frac = 0.8;
  std::vector<double> budgets = {0.0, 0.3, 0.7, 1.0};  // fractions of the decoupling need
  std::vector<Method> methods = {Method::kEven, Method::kOpt};
  std::vector<management::Approach> approaches = {std::begin(management::kAllApproaches),
                                                  std::end(management::kAllApproaches)};
  std::optional<std::filesystem::path> economics;
  std::filesystem::path out = "out";
  int jobs = 1;
  double step_fraction = management::kDefaultStepFraction;
  bool renewable_comparison = false;

  // Throws grid::ValidationError.
  void validate() const;
};

// INI with an [experiment] section and an optional [synth] section; relative
// paths resolve against the config file's folder. Throws grid::ValidationError.
ExperimentConfig load_experiment(const std::filesystem::path& path);
ExperimentConfig parse_experiment(const std::string& ini_text, const std::filesystem::path& base = {},
                                  const std::string& origin = "<config>");

std::vector<double> parse_budget_list(const std::string& text);
std::vector<Method> parse_method_list(const std::string& text);
std::vector<management::Approach> parse_approach_list(const std::string& text);

struct Instance {
  grid::Grid grid;
  grid::ScenarioSet scenarios;
};

// Grid file plus its scenarios, or a synthetic instance; the train/eval split
// follows seed and train_frac either way.
Instance load_instance(const ExperimentConfig& cfg);

}  // namespace dcflex::cli
