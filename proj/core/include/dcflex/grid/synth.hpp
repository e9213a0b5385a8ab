#pragma once

#include <cstdint>

#include "dcflex/grid/grid.hpp"
#include "dcflex/grid/scenario.hpp"

namespace dcflex::grid {

// Seeded synthetic grid standing in for a real reduced transmission model.
//
// Topology is a random spanning tree plus chords. Non-DC demand follows a
// double-peak daily template scaled by season and weekend factors, solar is a
// clamped sinusoid over seasonal daylight hours, wind is a seeded AR(1)
// capacity-factor series. Wind and solar energy are scaled so that, summed
// over the whole scenario set, they equal exactly wind_pct / solar_pct of total
// demand (non-DC demand plus average datacenter load).
struct SynthOptions {
  int buses = 10;
  int datacenters = 3;
  double wind_pct = 60.0;
  double solar_pct = 0.0;
  std::uint64_t seed = 1;
  int days = 10;
  int hours = 24;
  double dc_power_max = 800.0;
  double dc_util_min = 0.4;
  double dc_util_avg = 0.7;
  double dc_util_max = 1.0;
  // Average datacenter load as a share of total grid load.
  double dc_load_share = 0.38;
  double train_frac = 0.8;
};

struct SynthResult {
  Grid grid;
  ScenarioSet scenarios;
};

// Throws std::invalid_argument when the request cannot be met (fewer than two
// buses, more datacenters than buses, mix above 100%, non-positive horizon).
SynthResult synth_grid(const SynthOptions& options);

// (wind + solar + other) available energy / total demand over the set.
double renewable_fraction(const Grid& grid, const ScenarioSet& set);

}  // namespace dcflex::grid
