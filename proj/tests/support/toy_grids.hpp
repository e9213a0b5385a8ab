#pragma once

#include <cstdint>

#include "dcflex/grid/grid.hpp"
#include "dcflex/grid/scenario.hpp"

namespace dcflex::toy {

struct Instance {
  grid::Grid grid;
  grid::DayScenario day;
};

// Zero-filled day matching the grid's profiled entities.
grid::DayScenario empty_day(const grid::Grid& g, int hours, const std::string& id = "toy");

// One bus, gen C=10 Pmax=100, load 50, T=1.
Instance one_bus();

// Cheap gen (10) at A, expensive (50) at B, load 50 at B, line limit 30.
Instance two_bus_congestion();

// One bus, gen Pmax 40, load 50: 10 MW shed.
Instance forced_shedding();

// One bus, wind 100 MW against 50 MW of load; no export.
Instance oversupply();

// Three buses: a wind pocket at bus W behind a thin line, two DCs at W,
// gas at the hub. PlanShare sees identical cheap hours and both DCs pile
// onto them, oversubscribing the pocket.
Instance overshifting();

// Small random instance (2-4 buses, 1-2 DCs, T hours) for property sweeps.
Instance random_day(std::uint64_t seed, int hours = 6);

}  // namespace dcflex::toy
