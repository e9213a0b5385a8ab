#include "dcflex/grid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace dcflex::grid {

namespace {

constexpr double kWeekendFactor = 0.88;
constexpr double kOtherShare = 0.015;
constexpr double kImportShare = 0.05;

double season_factor(Season s) {
  switch (s) {
    case Season::kWinter: return 1.0;
    case Season::kSpring: return 0.9;
    case Season::kSummer: return 1.15;
    case Season::kFall: return 0.95;
  }
  return 1.0;
}

std::pair<double, double> daylight(Season s) {
  switch (s) {
    case Season::kWinter: return {7.0, 17.0};
    case Season::kSpring: return {6.0, 19.0};
    case Season::kSummer: return {5.5, 20.0};
    case Season::kFall: return {6.5, 18.0};
  }
  return {6.0, 18.0};
}

// Double-peak shape, morning around 8h and evening around 19h.
double demand_shape(double clock) {
  auto bump = [](double c, double mu, double sd) {
    const double z = (c - mu) / sd;
    return std::exp(-0.5 * z * z);
  };
  return 0.72 + 0.18 * bump(clock, 8.0, 2.0) + 0.30 * bump(clock, 19.0, 2.5);
}

double clock_of(int t, int hours) { return (t + 0.5) * 24.0 / hours; }

template <typename Rng>
std::vector<int> pick_distinct(Rng& rng, int n, int k) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);
  return order;
}

}  // namespace

SynthResult synth_grid(const SynthOptions& o) {
  if (o.buses < 2) throw std::invalid_argument("synthetic grid needs at least 2 buses");
  if (o.datacenters < 0 || o.datacenters > o.buses) {
    throw std::invalid_argument(
        fmt::format("cannot place {} datacenters on {} buses", o.datacenters, o.buses));
  }
  if (o.wind_pct < 0 || o.solar_pct < 0 || o.wind_pct + o.solar_pct > 100.0) {
    throw std::invalid_argument("wind + solar share must lie in [0, 100] percent");
  }
  if (o.days <= 0 || o.hours <= 0) throw std::invalid_argument("days and hours must be positive");
  if (!(o.dc_load_share > 0.0 && o.dc_load_share < 1.0)) {
    throw std::invalid_argument("datacenter load share must lie in (0, 1)");
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double a, double b) { return a + (b - a) * unit(rng); };

  SynthResult res;
  Grid& g = res.grid;
  const int n = o.buses;
  for (int i = 0; i < n; ++i) g.buses.push_back(Bus{fmt::format("bus{}", i + 1)});

  // Datacenters first so their sizing drives everything else.
  for (int k = 0; int b : pick_distinct(rng, n, o.datacenters)) {
    Datacenter d;
    d.id = fmt::format("dc{}", ++k);
    d.bus = b;
    d.power_max = o.dc_power_max;
    d.util_min = o.dc_util_min;
    d.util_avg = o.dc_util_avg;
    d.util_max = o.dc_util_max;
    g.datacenters.push_back(d);
  }
  double dc_avg = 0.0;
  double dc_peak = 0.0;
  for (const Datacenter& d : g.datacenters) {
    dc_avg += d.power_avg();
    dc_peak += d.load_max();
  }
  // With no datacenters fall back to a nominal 1 GW system.
  const double base_avg =
      dc_avg > 0.0 ? dc_avg * (1.0 - o.dc_load_share) / o.dc_load_share : 1000.0;
  const double total_avg = base_avg + dc_avg;

  // Topology: random spanning tree, then chords.
  std::set<std::pair<int, int>> edges;
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < n; ++i) {
      const int a = order[i];
      const int b = order[static_cast<int>(rng() % static_cast<std::uint64_t>(i))];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
    const int chords = (n + 2) / 3;
    const auto max_edges = static_cast<std::size_t>(n) * (n - 1) / 2;
    for (int c = 0, tries = 0; c < chords && edges.size() < max_edges && tries < 100 * n; ++tries) {
      const int a = static_cast<int>(rng() % n);
      const int b = static_cast<int>(rng() % n);
      if (a == b) continue;
      if (edges.insert({std::min(a, b), std::max(a, b)}).second) ++c;
    }
  }
  for (const auto& [a, b] : edges) {
    Line l;
    l.id = fmt::format("line{}", g.lines.size() + 1);
    l.from = a;
    l.to = b;
    l.susceptance = std::round(uniform(300.0, 900.0));
    l.flow_limit = std::round(total_avg * uniform(0.12, 0.25));
    g.lines.push_back(l);
  }

  std::vector<double> share(n);
  for (double& s : share) s = uniform(0.5, 1.5);
  const double share_sum = std::accumulate(share.begin(), share.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    g.loads.push_back(Load{fmt::format("load{}", i + 1), i});
  }

  const int n_farms = std::max(1, n / 4);
  for (int k = 0; int b : pick_distinct(rng, n, n_farms)) {
    g.wind.push_back(RenewableFarm{fmt::format("wind{}", ++k), b, Penalties::kWindCurtailment});
  }
  for (int k = 0; int b : pick_distinct(rng, n, n_farms)) {
    g.solar.push_back(RenewableFarm{fmt::format("solar{}", ++k), b, Penalties::kSolarCurtailment});
  }
  g.other.push_back(RenewableFarm{"other1", static_cast<int>(rng() % n), Penalties::kOtherCurtailment});
  g.imports.push_back(ImportPoint{"import1", 0, Penalties::kImportCurtailment});

  // Day profiles.
  const int T = o.hours;
  double shape_mean = 0.0;
  for (int t = 0; t < T; ++t) shape_mean += demand_shape(clock_of(t, T)) / T;
  std::vector<double> wind_scale(g.wind.size());
  for (double& w : wind_scale) w = uniform(0.8, 1.2);
  std::vector<double> solar_scale(g.solar.size());
  for (double& w : solar_scale) w = uniform(0.8, 1.2);
  std::normal_distribution<double> wind_noise(0.0, 0.08);

  constexpr Season kSeasons[] = {Season::kWinter, Season::kSpring, Season::kSummer, Season::kFall};
  ScenarioSet& set = res.scenarios;
  double demand_energy = 0.0;
  double wind_energy = 0.0;
  double solar_energy = 0.0;
  double peak_demand = 0.0;
  for (int d = 0; d < o.days; ++d) {
    DayScenario day;
    day.id = fmt::format("day{:03}", d + 1);
    day.day_type.season = kSeasons[(d / 2) % 4];
    day.day_type.weekend = d % 2 == 1;
    const double level = season_factor(day.day_type.season) *
                         (day.day_type.weekend ? kWeekendFactor : 1.0) *
                         (1.0 + uniform(-0.03, 0.03));
    day.demand.resize(n, T);
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < T; ++t) {
        day.demand(i, t) =
            base_avg * share[i] / share_sum * level * demand_shape(clock_of(t, T)) / shape_mean;
      }
    }
    for (int t = 0; t < T; ++t) {
      peak_demand = std::max(peak_demand, day.demand.col(t).sum());
    }
    demand_energy += day.demand.sum() + dc_avg * T;

    day.wind.resize(static_cast<Eigen::Index>(g.wind.size()), T);
    for (std::size_t f = 0; f < g.wind.size(); ++f) {
      double cf = uniform(0.2, 0.6);
      const double mu = uniform(0.25, 0.5);
      for (int t = 0; t < T; ++t) {
        cf = std::clamp(0.85 * cf + 0.15 * mu + wind_noise(rng), 0.02, 1.0);
        day.wind(static_cast<Eigen::Index>(f), t) = cf * wind_scale[f];
      }
    }
    wind_energy += day.wind.sum();

    const auto [rise, set_h] = daylight(day.day_type.season);
    const double cloud = uniform(0.6, 1.0);
    day.solar.resize(static_cast<Eigen::Index>(g.solar.size()), T);
    for (std::size_t f = 0; f < g.solar.size(); ++f) {
      for (int t = 0; t < T; ++t) {
        const double c = clock_of(t, T);
        const double v = (c <= rise || c >= set_h)
                             ? 0.0
                             : std::max(0.0, std::sin(kPi * (c - rise) / (set_h - rise)));
        day.solar(static_cast<Eigen::Index>(f), t) = v * cloud * solar_scale[f];
      }
    }
    solar_energy += day.solar.sum();
    set.days.push_back(std::move(day));
  }

  const double hourly_avg = demand_energy / (static_cast<double>(o.days) * T);
  const double wind_k = wind_energy > 0.0 ? o.wind_pct / 100.0 * demand_energy / wind_energy : 0.0;
  const double solar_k =
      solar_energy > 0.0 ? o.solar_pct / 100.0 * demand_energy / solar_energy : 0.0;
  for (DayScenario& day : set.days) {
    day.wind *= wind_k;
    day.solar *= solar_k;
    day.other = Eigen::MatrixXd::Constant(1, T, kOtherShare * hourly_avg);
    day.imports = Eigen::MatrixXd::Constant(1, T, kImportShare * hourly_avg);
  }

  // Thermal fleet sized on peak demand including datacenters at full power.
  const double fleet = 1.5 * (peak_demand + dc_peak);
  auto add_units = [&](Fuel fuel, const char* tag, double total, int units, double ramp_frac) {
    for (int k = 0; int b : pick_distinct(rng, n, units)) {
      Generator gen;
      gen.id = fmt::format("{}{}", tag, ++k);
      gen.bus = b;
      gen.fuel = fuel;
      gen.cost = default_generation_cost(fuel);
      gen.capacity = std::round(total / units);
      gen.ramp_up = gen.ramp_down = std::round(gen.capacity * ramp_frac);
      g.generators.push_back(gen);
    }
  };
  add_units(Fuel::kNuclear, "nuclear", 0.20 * fleet, 1, 0.05);
  add_units(Fuel::kCoal, "coal", 0.25 * fleet, std::min(2, n), 0.20);
  add_units(Fuel::kGas, "gas", 0.55 * fleet, (n + 1) / 2, 0.60);

  assign_week_weights(set.days);
  set.assign_split(o.train_frac, o.seed);
  g.validate();
  set.validate(g);
  return res;
}

double renewable_fraction(const Grid& grid, const ScenarioSet& set) {
  double ren = 0.0;
  double demand = 0.0;
  double dc_avg = 0.0;
  for (const Datacenter& d : grid.datacenters) dc_avg += d.power_avg();
  for (const DayScenario& d : set.days) {
    ren += d.wind.sum() + d.solar.sum() + d.other.sum();
    demand += d.demand.sum() + dc_avg * d.hours();
  }
  return demand > 0.0 ? ren / demand : 0.0;
}

}  // namespace dcflex::grid
