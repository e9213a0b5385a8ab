#include "dcflex/grid/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "dcflex/util/csv.hpp"
#include "json.hpp"

namespace dcflex::grid {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{}", v); }

namespace {

[[noreturn]] void schema_error(std::string_view record, const std::string& id,
                               std::string_view field, std::string_view what) {
  throw ValidationError(fmt::format("{} '{}': field '{}' {}", record, id, field, what));
}

std::string require_id(const json& rec, std::string_view record, std::size_t index) {
  if (!rec.is_object()) {
    throw ValidationError(fmt::format("{} #{}: record must be an object", record, index));
  }
  auto it = rec.find("id");
  if (it == rec.end() || !it->is_string()) {
    throw ValidationError(fmt::format("{} #{}: field 'id' missing or not a string", record, index));
  }
  return it->get<std::string>();
}

double number(const json& rec, std::string_view record, const std::string& id,
              const char* field, std::optional<double> fallback = std::nullopt) {
  auto it = rec.find(field);
  if (it == rec.end()) {
    if (fallback) return *fallback;
    schema_error(record, id, field, "is missing");
  }
  if (!it->is_number()) schema_error(record, id, field, "must be a number");
  return it->get<double>();
}

std::string text(const json& rec, std::string_view record, const std::string& id,
                 const char* field) {
  auto it = rec.find(field);
  if (it == rec.end()) schema_error(record, id, field, "is missing");
  if (!it->is_string()) schema_error(record, id, field, "must be a string");
  return it->get<std::string>();
}

int bus_ref(const Grid& g, const json& rec, std::string_view record, const std::string& id,
            const char* field) {
  const std::string bus = text(rec, record, id, field);
  const int idx = g.bus_index(bus);
  if (idx < 0) schema_error(record, id, field, fmt::format("references unknown bus '{}'", bus));
  return idx;
}

const json& array(const json& root, const char* key, bool required) {
  static const json kEmpty = json::array();
  auto it = root.find(key);
  if (it == root.end()) {
    if (required) throw ValidationError(fmt::format("grid: top-level array '{}' is missing", key));
    return kEmpty;
  }
  if (!it->is_array()) throw ValidationError(fmt::format("grid: '{}' must be an array", key));
  return *it;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

Grid grid_from_json(const std::string& text_in) {
  json root;
  try {
    root = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("grid: invalid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw ValidationError("grid: top level must be an object");

  Grid g;
  const json& buses = array(root, "buses", true);
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const json& r = buses[i];
    Bus b;
    b.id = require_id(r, "bus", i);
    b.theta_min = number(r, "bus", b.id, "theta_min", -kPi);
    b.theta_max = number(r, "bus", b.id, "theta_max", kPi);
    g.buses.push_back(b);
  }
  const json& lines = array(root, "lines", false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json& r = lines[i];
    Line l;
    l.id = require_id(r, "line", i);
    l.from = bus_ref(g, r, "line", l.id, "from");
    l.to = bus_ref(g, r, "line", l.id, "to");
    l.susceptance = number(r, "line", l.id, "susceptance");
    l.flow_limit = number(r, "line", l.id, "flow_limit");
    g.lines.push_back(l);
  }
  const json& gens = array(root, "generators", false);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const json& r = gens[i];
    Generator gen;
    gen.id = require_id(r, "generator", i);
    gen.bus = bus_ref(g, r, "generator", gen.id, "bus");
    const std::string fuel = text(r, "generator", gen.id, "fuel");
    if (fuel != "nuclear" && fuel != "coal" && fuel != "gas") {
      schema_error("generator", gen.id, "fuel", fmt::format("'{}' is not nuclear|coal|gas", fuel));
    }
    gen.fuel = parse_fuel(fuel);
    gen.cost = number(r, "generator", gen.id, "cost", default_generation_cost(gen.fuel));
    gen.capacity = number(r, "generator", gen.id, "capacity");
    gen.ramp_up = number(r, "generator", gen.id, "ramp_up", gen.capacity);
    gen.ramp_down = number(r, "generator", gen.id, "ramp_down", gen.capacity);
    g.generators.push_back(gen);
  }
  const json& imports = array(root, "imports", false);
  for (std::size_t i = 0; i < imports.size(); ++i) {
    const json& r = imports[i];
    ImportPoint m;
    m.id = require_id(r, "import", i);
    m.bus = bus_ref(g, r, "import", m.id, "bus");
    m.curtailment_penalty =
        number(r, "import", m.id, "curtailment_penalty", Penalties::kImportCurtailment);
    g.imports.push_back(m);
  }
  const json& renewables = array(root, "renewables", false);
  for (std::size_t i = 0; i < renewables.size(); ++i) {
    const json& r = renewables[i];
    RenewableFarm f;
    f.id = require_id(r, "renewable", i);
    f.bus = bus_ref(g, r, "renewable", f.id, "bus");
    const std::string kind = text(r, "renewable", f.id, "kind");
    if (kind == "wind") {
      f.curtailment_penalty =
          number(r, "renewable", f.id, "curtailment_penalty", Penalties::kWindCurtailment);
      g.wind.push_back(f);
    } else if (kind == "solar") {
      f.curtailment_penalty =
          number(r, "renewable", f.id, "curtailment_penalty", Penalties::kSolarCurtailment);
      g.solar.push_back(f);
    } else if (kind == "other") {
      f.curtailment_penalty =
          number(r, "renewable", f.id, "curtailment_penalty", Penalties::kOtherCurtailment);
      g.other.push_back(f);
    } else {
      schema_error("renewable", f.id, "kind", fmt::format("'{}' is not wind|solar|other", kind));
    }
  }
  const json& loads = array(root, "loads", false);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const json& r = loads[i];
    Load d;
    d.id = require_id(r, "load", i);
    d.bus = bus_ref(g, r, "load", d.id, "bus");
    d.shed_penalty = number(r, "load", d.id, "shed_penalty", Penalties::kNonDcShedding);
    g.loads.push_back(d);
  }
  const json& dcs = array(root, "datacenters", false);
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    const json& r = dcs[i];
    Datacenter d;
    d.id = require_id(r, "datacenter", i);
    d.bus = bus_ref(g, r, "datacenter", d.id, "bus");
    d.power_max = number(r, "datacenter", d.id, "power_max");
    d.util_min = number(r, "datacenter", d.id, "util_min");
    d.util_avg = number(r, "datacenter", d.id, "util_avg");
    d.util_max = number(r, "datacenter", d.id, "util_max");
    d.shed_penalty = number(r, "datacenter", d.id, "shed_penalty", Penalties::kDcShedding);
    g.datacenters.push_back(d);
  }
  g.validate();
  return g;
}

std::string grid_to_json(const Grid& g) {
  json root;
  root["buses"] = json::array();
  for (const Bus& b : g.buses) {
    root["buses"].push_back({{"id", b.id}, {"theta_min", b.theta_min}, {"theta_max", b.theta_max}});
  }
  root["lines"] = json::array();
  for (const Line& l : g.lines) {
    root["lines"].push_back({{"id", l.id},
                             {"from", g.buses[l.from].id},
                             {"to", g.buses[l.to].id},
                             {"susceptance", l.susceptance},
                             {"flow_limit", l.flow_limit}});
  }
  root["generators"] = json::array();
  for (const Generator& x : g.generators) {
    root["generators"].push_back({{"id", x.id},
                                  {"bus", g.buses[x.bus].id},
                                  {"fuel", std::string(to_string(x.fuel))},
                                  {"cost", x.cost},
                                  {"capacity", x.capacity},
                                  {"ramp_up", x.ramp_up},
                                  {"ramp_down", x.ramp_down}});
  }
  root["imports"] = json::array();
  for (const ImportPoint& m : g.imports) {
    root["imports"].push_back(
        {{"id", m.id}, {"bus", g.buses[m.bus].id}, {"curtailment_penalty", m.curtailment_penalty}});
  }
  root["renewables"] = json::array();
  const std::pair<const char*, const std::vector<RenewableFarm>*> kinds[] = {
      {"wind", &g.wind}, {"solar", &g.solar}, {"other", &g.other}};
  for (const auto& [kind, farms] : kinds) {
    for (const RenewableFarm& f : *farms) {
      root["renewables"].push_back({{"id", f.id},
                                    {"bus", g.buses[f.bus].id},
                                    {"kind", kind},
                                    {"curtailment_penalty", f.curtailment_penalty}});
    }
  }
  root["loads"] = json::array();
  for (const Load& d : g.loads) {
    root["loads"].push_back(
        {{"id", d.id}, {"bus", g.buses[d.bus].id}, {"shed_penalty", d.shed_penalty}});
  }
  root["datacenters"] = json::array();
  for (const Datacenter& d : g.datacenters) {
    root["datacenters"].push_back({{"id", d.id},
                                   {"bus", g.buses[d.bus].id},
                                   {"power_max", d.power_max},
                                   {"util_min", d.util_min},
                                   {"util_avg", d.util_avg},
                                   {"util_max", d.util_max},
                                   {"shed_penalty", d.shed_penalty}});
  }
  return root.dump(2) + "\n";
}

Grid load_grid(const std::filesystem::path& path) { return grid_from_json(read_file(path)); }

void save_grid(const Grid& grid, const std::filesystem::path& path) {
  write_file(path, grid_to_json(grid));
}

namespace {

struct ProfileSlot {
  Eigen::MatrixXd DayScenario::*matrix;
  Eigen::Index row;
};

std::map<std::string, ProfileSlot> profile_slots(const Grid& g) {
  std::map<std::string, ProfileSlot> slots;
  auto add = [&](const auto& entities, Eigen::MatrixXd DayScenario::*m) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
      slots[entities[i].id] = {m, static_cast<Eigen::Index>(i)};
    }
  };
  add(g.loads, &DayScenario::demand);
  add(g.imports, &DayScenario::imports);
  add(g.wind, &DayScenario::wind);
  add(g.solar, &DayScenario::solar);
  add(g.other, &DayScenario::other);
  return slots;
}

}  // namespace

ScenarioSet load_scenarios(const Grid& grid, const std::filesystem::path& profiles,
                           const std::filesystem::path& scenarios) {
  ScenarioSet set;
  std::map<std::string, std::size_t> index;

  const csv::CsvTable meta = csv::read_csv(scenarios);
  meta.require_header({"scenario_id", "season", "day_kind", "weight"});
  for (std::size_t r = 0; r < meta.rows.size(); ++r) {
    const auto& row = meta.rows[r];
    DayScenario d;
    d.id = row[0];
    d.day_type.season = parse_season(row[1]);
    if (row[2] == "weekday") {
      d.day_type.weekend = false;
    } else if (row[2] == "weekend") {
      d.day_type.weekend = true;
    } else {
      throw ValidationError(fmt::format("{}:{}: day_kind '{}' is not weekday|weekend",
                                        scenarios.string(), r + 2, row[2]));
    }
    d.weight = csv::parse_number(row[3], scenarios, r + 2);
    if (!index.emplace(d.id, set.days.size()).second) {
      throw ValidationError(fmt::format("{}: duplicate scenario '{}'", scenarios.string(), d.id));
    }
    set.days.push_back(std::move(d));
  }

  const csv::CsvTable prof = csv::read_csv(profiles);
  prof.require_header({"scenario_id", "entity_id", "hour", "value"});
  int hours = 0;
  for (std::size_t r = 0; r < prof.rows.size(); ++r) {
    const double h = csv::parse_number(prof.rows[r][2], profiles, r + 2);
    if (h < 1 || h != std::floor(h)) {
      throw ValidationError(fmt::format("{}:{}: hour must be a positive integer",
                                        profiles.string(), r + 2));
    }
    hours = std::max(hours, static_cast<int>(h));
  }
  const auto slots = profile_slots(grid);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (DayScenario& d : set.days) {
    d.demand = Eigen::MatrixXd::Constant(grid.loads.size(), hours, nan);
    d.imports = Eigen::MatrixXd::Constant(grid.imports.size(), hours, nan);
    d.wind = Eigen::MatrixXd::Constant(grid.wind.size(), hours, nan);
    d.solar = Eigen::MatrixXd::Constant(grid.solar.size(), hours, nan);
    d.other = Eigen::MatrixXd::Constant(grid.other.size(), hours, nan);
  }
  for (std::size_t r = 0; r < prof.rows.size(); ++r) {
    const auto& row = prof.rows[r];
    auto sit = index.find(row[0]);
    if (sit == index.end()) {
      throw ValidationError(fmt::format("{}:{}: unknown scenario '{}'", profiles.string(), r + 2, row[0]));
    }
    auto eit = slots.find(row[1]);
    if (eit == slots.end()) {
      throw ValidationError(fmt::format("{}:{}: unknown profiled entity '{}'", profiles.string(), r + 2, row[1]));
    }
    const int hour = static_cast<int>(csv::parse_number(row[2], profiles, r + 2));
    DayScenario& d = set.days[sit->second];
    (d.*(eit->second.matrix))(eit->second.row, hour - 1) = csv::parse_number(row[3], profiles, r + 2);
  }
  set.split.assign(set.days.size(), Split::kTrain);
  set.validate(grid);
  return set;
}

void save_scenarios(const Grid& grid, const ScenarioSet& set,
                    const std::filesystem::path& profiles,
                    const std::filesystem::path& scenarios) {
  std::string meta = "scenario_id,season,day_kind,weight\n";
  std::string prof = "scenario_id,entity_id,hour,value\n";
  for (const DayScenario& d : set.days) {
    meta += fmt::format("{},{},{},{}\n", d.id, to_string(d.day_type.season),
                        d.day_type.weekend ? "weekend" : "weekday", format_double(d.weight));
    auto dump = [&](const auto& entities, const Eigen::MatrixXd& m) {
      for (std::size_t i = 0; i < entities.size(); ++i) {
        for (Eigen::Index t = 0; t < m.cols(); ++t) {
          prof += fmt::format("{},{},{},{}\n", d.id, entities[i].id, t + 1,
                              format_double(m(static_cast<Eigen::Index>(i), t)));
        }
      }
    };
    dump(grid.loads, d.demand);
    dump(grid.imports, d.imports);
    dump(grid.wind, d.wind);
    dump(grid.solar, d.solar);
    dump(grid.other, d.other);
  }
  write_file(scenarios, meta);
  write_file(profiles, prof);
}

}  // namespace dcflex::grid
