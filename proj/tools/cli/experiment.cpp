#include "experiment.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace dcflex::cli {

namespace pt = boost::property_tree;
using grid::ValidationError;

std::string_view to_string(Method m) { return m == Method::kEven ? "even" : "opt"; }

Method parse_method(std::string_view name) {
  if (name == "even") return Method::kEven;
  if (name == "opt") return Method::kOpt;
  throw ValidationError(fmt::format("unknown distribution method '{}' (expected even or opt)", name));
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

double number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return v;
}

int integer(const std::string& text, const std::string& what) {
  const double v = number(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ValidationError(fmt::format("{}: '{}' is not an integer", what, text));
  }
  return static_cast<int>(v);
}

bool boolean(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError(fmt::format("{}: '{}' is not true or false", what, text));
}

}  // namespace

std::vector<double> parse_budget_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split_list(text)) out.push_back(number(p, "budget"));
  return out;
}

std::vector<Method> parse_method_list(const std::string& text) {
  std::vector<Method> out;
  for (const auto& p : split_list(text)) out.push_back(parse_method(p));
  return out;
}

std::vector<management::Approach> parse_approach_list(const std::string& text) {
  std::vector<management::Approach> out;
  for (const auto& p : split_list(text)) {
    try {
      out.push_back(management::parse_approach(p));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (budgets.empty()) throw ValidationError("at least one budget fraction is required");
  for (double b : budgets) {
    if (!(b >= 0.0 && b <= 1.0)) throw ValidationError(fmt::format("budget fraction {} is outside [0, 1]", b));
  }
  if (methods.empty()) throw ValidationError("at least one distribution method is required");
  if (approaches.empty()) throw ValidationError("at least one management approach is required");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ValidationError("train_frac must be in (0, 1)");
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  if (!(step_fraction >= 0.0)) throw ValidationError("step_fraction must be >= 0");
  if (out.empty()) throw ValidationError("output directory must not be empty");
}

ExperimentConfig parse_experiment(const std::string& ini_text, const std::filesystem::path& base,
                                  const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{} line {}: {}", origin, e.line(), e.message()));
  }
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
  };
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string what = fmt::format("{} [{}] {}", origin, section, key);
      if (section == "experiment") {
        if (key == "grid") cfg.grid = resolve(v);
        else if (key == "economics") cfg.economics = resolve(v);
        else if (key == "out") cfg.out = resolve(v);
        else if (key == "budgets") cfg.budgets = parse_budget_list(v);
        else if (key == "methods") cfg.methods = parse_method_list(v);
        else if (key == "approaches") cfg.approaches = parse_approach_list(v);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer(v, what));
        else if (key == "train_frac") cfg.train_frac = number(v, what);
        else if (key == "jobs") cfg.jobs = integer(v, what);
        else if (key == "step_fraction") cfg.step_fraction = number(v, what);
        else if (key == "renewable_comparison") cfg.renewable_comparison = boolean(v, what);
        else throw ValidationError(fmt::format("{}: unknown setting", what));
      } else if (section == "synth") {
        grid::SynthOptions& s = cfg.synth;
        if (key == "buses") s.buses = integer(v, what);
        else if (key == "datacenters") s.datacenters = integer(v, what);
        else if (key == "wind_pct") s.wind_pct = number(v, what);
        else if (key == "solar_pct") s.solar_pct = number(v, what);
        else if (key == "days") s.days = integer(v, what);
        else if (key == "hours") s.hours = integer(v, what);
        else if (key == "dc_power_max") s.dc_power_max = number(v, what);
        else if (key == "dc_util_min") s.dc_util_min = number(v, what);
        else if (key == "dc_util_avg") s.dc_util_avg = number(v, what);
        else if (key == "dc_util_max") s.dc_util_max = number(v, what);
        else if (key == "dc_load_share") s.dc_load_share = number(v, what);
        else throw ValidationError(fmt::format("{}: unknown setting", what));
      } else {
        throw ValidationError(fmt::format("{}: unknown section [{}]", origin, section));
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(), path.parent_path(), path.string());
}

Instance load_instance(const ExperimentConfig& cfg) {
  Instance x;
  if (!cfg.grid) {
    grid::SynthOptions s = cfg.synth;
    s.seed = cfg.seed;
    s.train_frac = cfg.train_frac;
    try {
      auto r = grid::synth_grid(s);
      x.grid = std::move(r.grid);
      x.scenarios = std::move(r.scenarios);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ValidationError(fmt::format("synthetic grid: {}", e.what()));
    }
    return x;
  }
  const std::filesystem::path& g = *cfg.grid;
  if (!std::filesystem::is_regular_file(g)) throw ValidationError(fmt::format("grid file not found: {}", g.string()));
  const auto dir = g.parent_path();
  for (const char* name : {"profiles.csv", "scenarios.csv"}) {
    if (!std::filesystem::is_regular_file(dir / name)) {
      throw ValidationError(fmt::format("scenario file not found: {}", (dir / name).string()));
    }
  }
  x.grid = grid::load_grid(g);
  x.scenarios = grid::load_scenarios(x.grid, dir / "profiles.csv", dir / "scenarios.csv");
  x.scenarios.assign_split(cfg.train_frac, cfg.seed);
  return x;
}

}  // namespace dcflex::cli
