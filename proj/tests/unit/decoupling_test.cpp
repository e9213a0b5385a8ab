#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "dcflex/decoupling/distribution.hpp"
#include "dcflex/decoupling/profile.hpp"
#include "toy_grids.hpp"

namespace dcflex::decoupling {
namespace {

Datacenter big_dc() {
  Datacenter dc;
  dc.id = "dc";
  dc.power_max = 800;
  dc.util_min = 0.4;
  dc.util_avg = 0.7;
  dc.util_max = 1.0;
  return dc;
}

TEST(Profile, ConstantLoadIsAllZero) {
  const Datacenter dc = big_dc();
  const auto p = decoupling_profile(Eigen::VectorXd::Constant(24, 560.0), dc);
  EXPECT_EQ(p.energy_deficit, 0.0);
  EXPECT_EQ(p.energy_surplus, 0.0);
  EXPECT_EQ(p.net_energy.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Profile, HalfDayLowHalfDayHigh) {
  Eigen::VectorXd load(24);
  load.head(12).setConstant(320.0);
  load.tail(12).setConstant(800.0);
  const auto p = decoupling_profile(load, big_dc());
  EXPECT_NEAR(p.energy_deficit, 2880.0, 1e-9);
  EXPECT_NEAR(p.energy_surplus, 2880.0, 1e-9);
  EXPECT_NEAR(p.net_energy(23), 0.0, 1e-9);
  EXPECT_NEAR(p.net_energy(11), -2880.0, 1e-9);
}

TEST(Profile, SawtoothMatchesBruteForce) {
  const Datacenter dc = big_dc();
  Eigen::VectorXd load(24);
  for (int t = 0; t < 24; ++t) load(t) = 320.0 + 480.0 * ((t % 6) / 5.0);
  const auto p = decoupling_profile(load, dc);
  double plus = 0, minus = 0;
  for (int t = 0; t < 24; ++t) {
    plus += load(t) > 560 ? load(t) - 560 : 0;
    minus += load(t) < 560 ? 560 - load(t) : 0;
    EXPECT_EQ(p.power_surplus(t) * p.power_deficit(t), 0.0);
    EXPECT_NEAR(p.net_energy(t), plus - minus, 1e-9);
  }
  EXPECT_NEAR(p.energy_surplus, plus, 1e-9);
  EXPECT_NEAR(p.energy_deficit, minus, 1e-9);
}

TEST(Profile, NegativeLoadRejected) {
  Eigen::VectorXd load = Eigen::VectorXd::Constant(4, 100.0);
  load(2) = -1.0;
  EXPECT_THROW(decoupling_profile(load, big_dc()), std::invalid_argument);
}

TEST(Profile, MaxPowerDeficit) {
  EXPECT_DOUBLE_EQ(max_power_deficit(big_dc()), 240.0);
  Datacenter flat = big_dc();
  flat.util_min = flat.util_avg;
  EXPECT_DOUBLE_EQ(max_power_deficit(flat), 0.0);
  Datacenter other = big_dc();
  other.power_max = 1000;
  other.util_avg = 0.9;
  EXPECT_NEAR(max_power_deficit(other), 500.0, 1e-9);
}

grid::Grid grid_with_dcs(const std::vector<double>& avg) {
  grid::Grid g;
  g.buses = {grid::Bus{"A"}};
  for (std::size_t i = 0; i < avg.size(); ++i) {
    Datacenter dc;
    dc.id = "dc" + std::to_string(i);
    dc.power_max = avg[i] * 2;
    dc.util_min = 0.25;
    dc.util_avg = 0.5;
    dc.util_max = 1.0;
    g.datacenters.push_back(dc);
  }
  return g;
}

TEST(EvenDist, EqualSplit) {
  const auto g = grid_with_dcs(std::vector<double>(30, 100.0));
  const auto a = even_distribution(g, 3000.0);
  for (Eigen::Index i = 0; i < 30; ++i) EXPECT_NEAR(a.energy_cap(i), 100.0, 1e-9);
  EXPECT_EQ(a.energy_cap.sum(), 3000.0);
  EXPECT_NO_THROW(a.validate(g));
}

TEST(EvenDist, ProportionalToAverageLoad) {
  const auto g = grid_with_dcs({100.0, 300.0});
  const auto a = even_distribution(g, 400.0, EvenMode::kLoadProportional);
  EXPECT_NEAR(a.energy_cap(0), 100.0, 1e-9);
  EXPECT_NEAR(a.energy_cap(1), 300.0, 1e-9);
  EXPECT_NEAR(a.power_cap(0), 50.0, 1e-9);
}

TEST(EvenDist, ZeroBudgetAndErrors) {
  const auto g = grid_with_dcs({100.0, 300.0});
  EXPECT_EQ(even_distribution(g, 0.0).energy_cap.sum(), 0.0);
  EXPECT_THROW(even_distribution(grid_with_dcs({}), 10.0), std::invalid_argument);
  EXPECT_THROW(even_distribution(g, -1.0), std::invalid_argument);
}

TEST(EvenDist, CapsSumExactlyForAwkwardSplits) {
  const auto g = grid_with_dcs(std::vector<double>(7, 100.0));
  for (double total : {1.0, 0.1, 1234.567, 1e-7}) {
    EXPECT_EQ(even_distribution(g, total).energy_cap.sum(), total) << total;
  }
}

TEST(Allocation, CsvRoundTrip) {
  const auto g = grid_with_dcs({100.0, 300.0});
  const auto a = even_distribution(g, 400.0 / 3.0);
  const auto path = std::filesystem::temp_directory_path() / "dcflex_alloc_rt.csv";
  save_allocation(a, path);
  const auto b = load_allocation(g, path);
  EXPECT_EQ(a.energy_cap, b.energy_cap);
  EXPECT_EQ(a.power_cap, b.power_cap);
  std::filesystem::remove(path);
}

// Flexible-load rows alone, minimizing a price vector: compare against brute
// force enumeration over a discretized load grid.
TEST(FlexibleLoad, MatchesEnumerationOnTinyHorizon) {
  Datacenter dc;
  dc.id = "dc";
  dc.power_max = 4;
  dc.util_min = 0.25;
  dc.util_avg = 0.5;
  dc.util_max = 1.0;  // loads in {1,2,3,4}, avg 2
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Vector3d price;
    for (int t = 0; t < 3; ++t) price(t) = std::uniform_real_distribution<double>(-5, 5)(rng);
    const double cap = std::uniform_int_distribution<int>(0, 3)(rng);
    lp::Model m;
    const auto f = add_flexible_load(m, dc, 3, cap, "", {});
    for (int t = 0; t < 3; ++t) m.add_objective(f.load[t], price(t));
    const auto s = lp::solve(m);
    ASSERT_TRUE(s.optimal());
    // Integer loads suffice: the rows are totally unimodular with integer data.
    double best = 1e18;
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; b <= 4; ++b)
        for (int c = 1; c <= 4; ++c) {
          const Eigen::Vector3d l(a, b, c);
          if (net_energy_violation(l, dc) > 0) continue;
          if (decoupling_profile(l, dc).energy_deficit > cap) continue;
          best = std::min(best, price.dot(l));
        }
    EXPECT_NEAR(s.objective, best, 1e-7) << "trial " << trial;
  }
}

std::vector<grid::DayScenario> random_days(const toy::Instance& base, int n, std::uint64_t seed) {
  std::vector<grid::DayScenario> days;
  for (int k = 0; k < n; ++k) {
    auto x = toy::random_day(seed + k, base.day.hours());
    grid::DayScenario d = base.day;
    d.id = "d" + std::to_string(k);
    std::mt19937_64 rng(seed * 31 + k);
    for (Eigen::Index i = 0; i < d.wind.size(); ++i) d.wind.data()[i] *= std::uniform_real_distribution<double>(0.3, 1.7)(rng);
    d.weight = k % 2 ? 2.0 : 5.0;
    days.push_back(d);
  }
  return days;
}

TEST(OptDist, ZeroBudgetEqualsFixedLoad) {
  const auto base = toy::random_day(77, 6);
  const auto days = random_days(base, 3, 10);
  const auto fixed = solve_fixed_days(base.grid, days);
  const auto opt = optimized_distribution(base.grid, days, 0.0);
  EXPECT_EQ(opt.alloc.energy_cap.sum(), 0.0);
  EXPECT_NEAR(opt.weighted_cost, fixed.weighted_cost, 1e-6 * std::max(1.0, fixed.weighted_cost));
}

TEST(OptDist, FullNeedMatchesUnconstrainedOptimum) {
  for (std::uint64_t seed : {3u, 11u, 19u}) {
    const auto base = toy::random_day(seed, 6);
    const auto days = random_days(base, 3, seed);
    const auto unconstrained = solve_flexible_days(base.grid, days, unlimited_allocation(base.grid));
    const double need = decoupling_need(base.grid, days);
    const auto opt = optimized_distribution(base.grid, days, need);
    EXPECT_NEAR(opt.weighted_cost, unconstrained.weighted_cost,
                1e-5 * std::max(1.0, std::abs(unconstrained.weighted_cost)))
        << "seed " << seed;
  }
}

TEST(OptDist, DominatesEvenAndIsBudgetMonotone) {
  for (std::uint64_t seed : {5u, 8u, 13u, 21u}) {
    const auto base = toy::random_day(seed, 6);
    const auto days = random_days(base, 4, seed);
    const double need = decoupling_need(base.grid, days);
    double prev = 1e300;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto opt = optimized_distribution(base.grid, days, frac * need);
      EXPECT_LE(opt.alloc.energy_cap.sum(), frac * need + 1e-6);
      const auto even = solve_flexible_days(base.grid, days, even_distribution(base.grid, frac * need));
      const double tol = 1e-5 * std::max(1.0, std::abs(even.weighted_cost));
      EXPECT_LE(opt.weighted_cost, even.weighted_cost + tol) << "seed " << seed << " frac " << frac;
      EXPECT_LE(opt.weighted_cost, prev + tol);
      prev = opt.weighted_cost;
      // The tightened caps reproduce the joint optimum when days are re-solved.
      const auto again = solve_flexible_days(base.grid, days, opt.alloc);
      EXPECT_NEAR(again.weighted_cost, opt.weighted_cost, tol);
    }
  }
}

// Two DCs: one behind a congested line next to surplus wind, one at an
// uncongested hub with flat prices. The pocket DC should get the budget.
TEST(OptDist, CongestedDatacenterGetsMore) {
  grid::Grid g;
  g.buses = {grid::Bus{"hub"}, grid::Bus{"pocket"}};
  g.lines = {grid::Line{"l", 0, 1, 300.0, 20.0}};
  g.generators = {grid::Generator{"gas", 0, grid::Fuel::kGas, 22.0, 500.0, 500.0, 500.0}};
  g.wind = {grid::RenewableFarm{"wind", 1, grid::Penalties::kWindCurtailment}};
  g.loads = {grid::Load{"hubload", 0}};
  for (int k = 0; k < 2; ++k) {
    Datacenter dc;
    dc.id = k == 0 ? "pocketdc" : "hubdc";
    dc.bus = k == 0 ? 1 : 0;
    dc.power_max = 100;
    dc.util_min = 0.4;
    dc.util_avg = 0.7;
    dc.util_max = 1.0;
    g.datacenters.push_back(dc);
  }
  auto day = toy::empty_day(g, 6);
  for (int t = 0; t < 6; ++t) {
    day.demand(0, t) = 80;
    day.wind(0, t) = t < 3 ? 60.0 : 130.0;
  }
  const std::vector<grid::DayScenario> days{day};
  const double budget = 60.0;
  const auto opt = optimized_distribution(g, days, budget);
  EXPECT_GT(opt.alloc.energy_cap(0), opt.alloc.energy_cap(1));
  // Coarse enumeration of cap splits never beats the LP.
  for (int k = 0; k <= 10; ++k) {
    DecouplingAllocation a = even_distribution(g, budget);
    a.energy_cap << budget * k / 10.0, budget * (10 - k) / 10.0;
    const auto r = solve_flexible_days(g, days, a);
    EXPECT_GE(r.weighted_cost, opt.weighted_cost - 1e-6);
  }
}

TEST(FlexibleDay, RespectsFlexibilityAndCaps) {
  for (std::uint64_t seed = 400; seed < 430; ++seed) {
    const auto x = toy::random_day(seed, 8);
    DecouplingAllocation a = even_distribution(x.grid, 25.0);
    const auto r = solve_flexible_day(x.grid, x.day, a);
    for (std::size_t i = 0; i < x.grid.datacenters.size(); ++i) {
      const Eigen::VectorXd load = r.dc_load.row(static_cast<Eigen::Index>(i)).transpose();
      const auto& dc = x.grid.datacenters[i];
      EXPECT_LE(range_violation(load, dc), 1e-6);
      EXPECT_LE(net_energy_violation(load, dc), 1e-6);
      EXPECT_LE(decoupling_profile(load, dc).energy_deficit, a.energy_cap(static_cast<Eigen::Index>(i)) + 1e-6);
    }
  }
}

}  // namespace
}  // namespace dcflex::decoupling
