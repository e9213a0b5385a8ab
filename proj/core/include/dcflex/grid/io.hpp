#pragma once

#include <filesystem>
#include <string>

#include "dcflex/grid/grid.hpp"
#include "dcflex/grid/scenario.hpp"

namespace dcflex::grid {

// grid.json: see docs/formats.md. Throws ValidationError naming the record
// and field on schema violations, std::runtime_error on I/O failures.
Grid load_grid(const std::filesystem::path& path);
Grid grid_from_json(const std::string& text);
std::string grid_to_json(const Grid& grid);
void save_grid(const Grid& grid, const std::filesystem::path& path);

// profiles.csv (scenario_id,entity_id,hour,value; hours are 1-based) plus
// scenarios.csv (scenario_id,season,day_kind,weight). Splits are not stored.
ScenarioSet load_scenarios(const Grid& grid, const std::filesystem::path& profiles,
                           const std::filesystem::path& scenarios);
void save_scenarios(const Grid& grid, const ScenarioSet& set,
                    const std::filesystem::path& profiles,
                    const std::filesystem::path& scenarios);

// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace dcflex::grid
