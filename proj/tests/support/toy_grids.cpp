#include "toy_grids.hpp"

#include <random>

#include <fmt/format.h>

namespace dcflex::toy {

using namespace dcflex::grid;

DayScenario empty_day(const Grid& g, int hours, const std::string& id) {
  DayScenario d;
  d.id = id;
  d.demand = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.loads.size()), hours);
  d.imports = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.imports.size()), hours);
  d.wind = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.wind.size()), hours);
  d.solar = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.solar.size()), hours);
  d.other = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.other.size()), hours);
  return d;
}

namespace {

Generator gen(const std::string& id, int bus, Fuel fuel, double cost, double cap) {
  return Generator{id, bus, fuel, cost, cap, cap, cap};
}

}  // namespace

Instance one_bus() {
  Instance x;
  x.grid.buses = {Bus{"A"}};
  x.grid.generators = {gen("g", 0, Fuel::kGas, 10.0, 100.0)};
  x.grid.loads = {Load{"L", 0}};
  x.day = empty_day(x.grid, 1);
  x.day.demand(0, 0) = 50.0;
  return x;
}

Instance two_bus_congestion() {
  Instance x;
  x.grid.buses = {Bus{"A"}, Bus{"B"}};
  x.grid.lines = {Line{"AB", 0, 1, 100.0, 30.0}};
  x.grid.generators = {gen("cheap", 0, Fuel::kCoal, 10.0, 200.0),
                       gen("dear", 1, Fuel::kGas, 50.0, 200.0)};
  x.grid.loads = {Load{"L", 1}};
  x.day = empty_day(x.grid, 1);
  x.day.demand(0, 0) = 50.0;
  return x;
}

Instance forced_shedding() {
  Instance x;
  x.grid.buses = {Bus{"A"}};
  x.grid.generators = {gen("g", 0, Fuel::kGas, 22.0, 40.0)};
  x.grid.loads = {Load{"L", 0}};
  x.day = empty_day(x.grid, 1);
  x.day.demand(0, 0) = 50.0;
  return x;
}

Instance oversupply() {
  Instance x;
  x.grid.buses = {Bus{"A"}};
  x.grid.generators = {gen("g", 0, Fuel::kGas, 22.0, 100.0)};
  x.grid.wind = {RenewableFarm{"w", 0, Penalties::kWindCurtailment}};
  x.grid.loads = {Load{"L", 0}};
  x.day = empty_day(x.grid, 1);
  x.day.demand(0, 0) = 50.0;
  x.day.wind(0, 0) = 100.0;
  return x;
}

Instance overshifting() {
  Instance x;
  Grid& g = x.grid;
  g.buses = {Bus{"hub"}, Bus{"pocket"}, Bus{"remote"}};
  g.lines = {Line{"hub-pocket", 0, 1, 500.0, 30.0}, Line{"hub-remote", 0, 2, 500.0, 500.0}};
  g.generators = {gen("gas", 0, Fuel::kGas, 22.0, 1000.0),
                  gen("peaker", 1, Fuel::kGas, 80.0, 300.0)};
  g.wind = {RenewableFarm{"wind", 1, Penalties::kWindCurtailment}};
  g.loads = {Load{"hub_load", 0}, Load{"remote_load", 2}};
  for (int k = 0; k < 2; ++k) {
    Datacenter dc;
    dc.id = fmt::format("dc{}", k + 1);
    dc.bus = 1;
    dc.power_max = 100.0;
    dc.util_min = 0.4;
    dc.util_avg = 0.7;
    dc.util_max = 1.0;
    g.datacenters.push_back(dc);
  }
  const int T = 8;
  x.day = empty_day(g, T, "overshift");
  for (int t = 0; t < T; ++t) {
    x.day.demand(0, t) = 50.0;
    x.day.demand(1, t) = 40.0;
    // Thin wind early, a modest surplus late.
    x.day.wind(0, t) = t < T / 2 ? 100.0 : 160.0;
  }
  return x;
}

Instance random_day(std::uint64_t seed, int hours) {
  std::mt19937_64 rng(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  Instance x;
  Grid& g = x.grid;
  const int n = 2 + pick(3);
  for (int i = 0; i < n; ++i) g.buses.push_back(Bus{fmt::format("b{}", i)});
  for (int i = 1; i < n; ++i) {
    g.lines.push_back(Line{fmt::format("l{}", i), pick(i), i, u(50, 500), u(10, 80)});
  }
  if (n >= 3 && pick(2) == 0) g.lines.push_back(Line{"chord", 0, n - 1, u(50, 500), u(10, 80)});

  const Fuel fuels[] = {Fuel::kNuclear, Fuel::kCoal, Fuel::kGas};
  const int n_gen = 1 + pick(3);
  for (int k = 0; k < n_gen; ++k) {
    Generator gg;
    gg.id = fmt::format("g{}", k);
    gg.bus = pick(n);
    gg.fuel = fuels[pick(3)];
    gg.cost = u(5, 60);
    gg.capacity = u(40, 160);
    gg.ramp_up = gg.ramp_down = gg.capacity * u(0.2, 1.0);
    g.generators.push_back(gg);
  }
  g.wind.push_back(RenewableFarm{"wind", pick(n), Penalties::kWindCurtailment});
  g.solar.push_back(RenewableFarm{"solar", pick(n), Penalties::kSolarCurtailment});
  g.imports.push_back(ImportPoint{"imp", 0, Penalties::kImportCurtailment});
  for (int i = 0; i < n; ++i) g.loads.push_back(Load{fmt::format("load{}", i), i});
  const int n_dc = 1 + pick(2);
  for (int k = 0; k < n_dc; ++k) {
    Datacenter dc;
    dc.id = fmt::format("dc{}", k);
    dc.bus = pick(n);
    dc.power_max = u(30, 120);
    dc.util_min = u(0.1, 0.5);
    dc.util_avg = u(dc.util_min, 0.9);
    dc.util_max = u(dc.util_avg, 1.0);
    g.datacenters.push_back(dc);
  }

  x.day = empty_day(g, hours, fmt::format("rand{}", seed));
  const double phase = u(0, 6.28);
  for (int t = 0; t < hours; ++t) {
    for (int i = 0; i < n; ++i) x.day.demand(i, t) = u(5, 40);
    x.day.wind(0, t) = std::max(0.0, u(-20, 120));
    x.day.solar(0, t) = std::max(0.0, 80.0 * std::sin(phase + 3.14159 * t / hours));
    x.day.imports(0, t) = u(0, 15);
  }
  return x;
}

}  // namespace dcflex::toy
