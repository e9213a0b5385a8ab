// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "dcflex/decoupling/distribution.hpp"
#include "dcflex/economics/economics.hpp"
#include "dcflex/grid/synth.hpp"
#include "dcflex/management/management.hpp"
#include "toy_grids.hpp"

namespace {

using namespace dcflex;
using management::Approach;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict c1_oracle() {
  Verdict v;
  const auto x = toy::two_bus_congestion();
  const auto t0 = Clock::now();
  const auto r = dispatch::solve_dispatch(x.grid, x.day, dispatch::average_dc_load(x.grid, x.day.hours()));
  const double dt = seconds_since(t0);
  const double flow = std::abs(r.flow(0, 0));
  const double lmp_a = r.lmp(0, 0), lmp_b = r.lmp(1, 0);
  v.detail = fmt::format("flow {:.6f} MW, LMP {:.6f}/{:.6f} $/MWh, {:.4f} s", flow, lmp_a, lmp_b, dt);
  if (std::abs(flow - 30) > 1e-4 || std::abs(lmp_a - 10) > 1e-4 || std::abs(lmp_b - 50) > 1e-4) v.fail(v.detail);
  if (dt >= 1.0) v.fail(v.detail);
  return v;
}

Verdict c2_shedding() {
  Verdict v;
  const auto x = toy::forced_shedding();
  const auto r = dispatch::solve_dispatch(x.grid, x.day, dispatch::average_dc_load(x.grid, x.day.hours()));
  v.detail = fmt::format("LMP {:.6f} $/MWh with {:.3f} MW shed", r.lmp(0, 0), r.shed_load.sum());
  if (std::abs(r.lmp(0, 0) - 1000) > 1e-3) v.fail(v.detail);
  return v;
}

Verdict c3_flexibility() {
  Verdict v;
  int checked = 0;
  double worst_range = 0, worst_net = 0, worst_cap = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto x = toy::random_day(seed, 6);
    double need = 0;
    for (const auto& dc : x.grid.datacenters) need += 6 * (dc.power_avg() - dc.load_min());
    const double frac = static_cast<double>(seed % 4) / 3.0;
    const auto alloc = decoupling::even_distribution(x.grid, frac * need);
    for (Approach a : management::kAllApproaches) {
      const auto o = management::simulate_day(x.grid, x.day, alloc, a);
      for (std::size_t i = 0; i < x.grid.datacenters.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const auto& dc = x.grid.datacenters[i];
        const Eigen::VectorXd load = o.loads.row(k).transpose();
        worst_range = std::max(worst_range, decoupling::range_violation(load, dc));
        worst_net = std::max(worst_net, decoupling::net_energy_violation(load, dc));
        worst_cap = std::max(worst_cap, o.profiles[i].energy_deficit - alloc.energy_cap(k));
        ++checked;
      }
    }
  }
  v.detail = fmt::format("{} DC-days, worst range {:.2e} MW, net {:.2e} MWh, cap {:.2e} MWh", checked,
                         worst_range, worst_net, worst_cap);
  if (worst_range > 1e-6 || worst_net > 1e-6 || worst_cap > 1e-6) v.fail(v.detail);
  return v;
}

struct Sweep {
  grid::Grid grid;
  std::vector<grid::DayScenario> days;
  std::vector<double> budgets;
  // [budget][day]
  std::vector<std::vector<management::DayOutcome>> ps, psgs, gc;
  std::vector<management::DayOutcome> fixed;
};

// Small synthetic grid, every day, budgets 0..1 in tenths, even split.
const Sweep& toy_sweep() {
  static const Sweep s = [] {
    Sweep s;
    grid::SynthOptions o;
    o.buses = 5;
    o.datacenters = 3;
    o.days = 6;
    o.seed = 11;
    auto r = grid::synth_grid(o);
    s.grid = r.grid;
    s.days = r.scenarios.days;
    const double need = decoupling::decoupling_need(s.grid, r.scenarios.train());
    for (const auto& d : s.days) {
      s.fixed.push_back(management::simulate_day(s.grid, d, decoupling::unlimited_allocation(s.grid),
                                                 Approach::kFixed));
    }
    for (int b = 0; b <= 10; ++b) {
      s.budgets.push_back(b / 10.0);
      const auto alloc = decoupling::even_distribution(s.grid, b / 10.0 * need);
      auto& ps = s.ps.emplace_back();
      auto& psgs = s.psgs.emplace_back();
      auto& gc = s.gc.emplace_back();
      for (const auto& d : s.days) {
        ps.push_back(management::simulate_day(s.grid, d, alloc, Approach::kPlanShare));
        psgs.push_back(management::simulate_day(s.grid, d, alloc, Approach::kPsGridScale));
        gc.push_back(management::simulate_day(s.grid, d, alloc, Approach::kGridCtrl));
      }
    }
    return s;
  }();
  return s;
}

Verdict c4_ordering() {
  Verdict v;
  const Sweep& s = toy_sweep();
  int pairs = 0, hours = 0;
  double worst = -1e300;
  for (std::size_t b = 0; b < s.budgets.size(); ++b) {
    for (std::size_t d = 0; d < s.days.size(); ++d) {
      const double ps = s.ps[b][d].grid_cost, psgs = s.psgs[b][d].grid_cost, gc = s.gc[b][d].grid_cost;
      const double tol = 1e-5 * std::abs(ps);
      worst = std::max({worst, (gc - psgs) / std::abs(ps), (psgs - ps) / std::abs(ps)});
      if (gc > psgs + tol || psgs > ps + tol) {
        v.fail(fmt::format("budget {} day {}: gridctrl {} ps-gridscale {} planshare {}", s.budgets[b], s.days[d].id,
                           gc, psgs, ps));
      }
      for (std::size_t i = 0; i < s.grid.datacenters.size(); ++i) {
        const double avg = s.grid.datacenters[i].power_avg();
        for (Eigen::Index t = 0; t < s.ps[b][d].loads.cols(); ++t) {
          const auto k = static_cast<Eigen::Index>(i);
          ++hours;
          if (std::abs(s.psgs[b][d].loads(k, t) - avg) > std::abs(s.ps[b][d].loads(k, t) - avg)) {
            v.fail(fmt::format("deviation grew: budget {} day {} dc {} hour {}", s.budgets[b], s.days[d].id,
                               s.grid.datacenters[i].id, t + 1));
          }
        }
      }
      ++pairs;
    }
  }
  if (v.pass) {
    v.detail = fmt::format("{} (scenario, budget) pairs, {} DC-hours; worst relative gap {:.2e}", pairs, hours,
                           worst);
  }
  return v;
}

Verdict c5_optdist() {
  Verdict v;
  const auto t0 = Clock::now();
  grid::SynthOptions o;  // 10 buses, 60% wind
  const auto r = grid::synth_grid(o);
  const auto train = r.scenarios.train();
  decoupling::FlexSolveOptions opts;
  opts.jobs = 4;
  const double need = decoupling::decoupling_need(r.grid, train, opts);
  double prev_opt = decoupling::solve_fixed_days(r.grid, train, opts).weighted_cost;
  double prev_even = prev_opt;
  double worst_gap = -1e300;
  for (int b = 1; b <= 10; ++b) {
    const double total = b / 10.0 * need;
    const auto opt = decoupling::optimized_distribution(r.grid, train, total, opts);
    const double opt_cost = decoupling::solve_flexible_days(r.grid, train, opt.alloc, opts).weighted_cost;
    const double even_cost =
        decoupling::solve_flexible_days(r.grid, train, decoupling::even_distribution(r.grid, total), opts)
            .weighted_cost;
    worst_gap = std::max(worst_gap, (opt_cost - even_cost) / even_cost);
    if (opt_cost > even_cost * (1 + 1e-9)) v.fail(fmt::format("budget {}: opt {} > even {}", b / 10.0, opt_cost, even_cost));
    if (opt_cost > prev_opt * (1 + 1e-5) || even_cost > prev_even * (1 + 1e-5)) {
      v.fail(fmt::format("budget {}: GridCtrl cost rose (opt {} -> {}, even {} -> {})", b / 10.0, prev_opt, opt_cost,
                         prev_even, even_cost));
    }
    prev_opt = opt_cost;
    prev_even = even_cost;
  }
  const double dt = seconds_since(t0);
  if (v.pass) v.detail = fmt::format("10 budgets, worst (opt-even)/even {:.3e}, {:.1f} s", worst_gap, dt);
  if (dt >= 600) v.fail(fmt::format("took {:.0f} s", dt));
  return v;
}

Verdict c6_shape() {
  Verdict v;
  grid::SynthOptions o;
  o.wind_pct = 10;
  o.solar_pct = 50;
  const auto r = grid::synth_grid(o);
  const auto train = r.scenarios.train();
  auto eval = r.scenarios.eval();
  grid::assign_week_weights(eval);
  decoupling::FlexSolveOptions opts;
  opts.jobs = 4;
  const double need = decoupling::decoupling_need(r.grid, train, opts);
  const dispatch::EmissionRates rates;
  const auto weighted = [&](const decoupling::DecouplingAllocation* alloc) {
    std::vector<double> cost, carbon;
    for (const auto& d : eval) {
      const auto o = alloc ? management::simulate_day(r.grid, d, *alloc, Approach::kGridCtrl)
                           : management::simulate_day(r.grid, d, decoupling::unlimited_allocation(r.grid),
                                                      Approach::kFixed);
      cost.push_back(o.grid_cost);
      carbon.push_back(o.grid_carbon);
    }
    return std::pair{grid::weighted_mean(eval, cost), grid::weighted_mean(eval, carbon)};
  };
  const auto fixed = weighted(nullptr);
  std::vector<std::pair<double, double>> at;
  for (double b : {0.0, 0.3, 0.7, 1.0}) {
    const auto alloc = decoupling::optimized_distribution(r.grid, train, b * need, opts).alloc;
    at.push_back(weighted(&alloc));
  }
  const double early = at[0].first - at[1].first, late = at[2].first - at[3].first;
  v.detail = fmt::format("fixed {:.0f} $, full budget {:.0f} $ / carbon {:.0f} -> {:.0f} kg; gain 0-0.3 {:.0f} $, "
                         "0.7-1.0 {:.0f} $",
                         fixed.first, at[3].first, fixed.second, at[3].second, early, late);
  if (!(at[3].first < fixed.first) || !(at[3].second < fixed.second) || !(late < early)) v.fail(v.detail);
  return v;
}

Verdict c7_overshifting() {
  Verdict v;
  const auto x = toy::overshifting();
  const auto alloc = decoupling::unlimited_allocation(x.grid);
  const auto ps = management::simulate_day(x.grid, x.day, alloc, Approach::kPlanShare);
  const auto psgs = management::simulate_day(x.grid, x.day, alloc, Approach::kPsGridScale);
  const double min_alpha = psgs.alpha ? psgs.alpha->minCoeff() : 1.0;
  v.detail = fmt::format("PlanShare {:.2f} $ vs PS-GridScale {:.2f} $, min alpha {:.4f}", ps.grid_cost,
                         psgs.grid_cost, min_alpha);
  if (!(ps.grid_cost - psgs.grid_cost > 0) || !(min_alpha < 1)) v.fail(v.detail);
  return v;
}

Verdict c8_act() {
  Verdict v;
  const Sweep& s = toy_sweep();
  double worst = 0;
  int days = 0;
  for (std::size_t b = 0; b < s.budgets.size(); ++b) {
    for (std::size_t d = 0; d < s.days.size(); ++d) {
      for (const auto* o : {&s.ps[b][d], &s.psgs[b][d], &s.gc[b][d]}) {
        const auto a = economics::allocate_carbon_act(s.fixed[d], *o);
        worst = std::max(worst, std::abs(a.reduction.sum() - a.delta) / std::max(1.0, std::abs(a.delta)));
        ++days;
      }
    }
  }
  double gm = 0;
  for (const auto& f : s.fixed) gm = std::max(gm, economics::allocate_carbon_gm(f, f).reduction.cwiseAbs().maxCoeff());
  v.detail = fmt::format("{} evaluated days, worst relative imbalance {:.2e}; GM with flex = fixed {:.1e} kg", days,
                         worst, gm);
  if (worst > 1e-9 || gm != 0.0) v.fail(v.detail);
  return v;
}

Verdict c9_tco() {
  Verdict v;
  economics::BatterySpec b;
  b.power_max = 240;
  b.energy_cap = 960;
  const double tco = economics::bes_tco(b, 1.0, 0.0);
  v.detail = fmt::format("{:.6f} M$/yr", tco / 1e6);
  if (std::abs(tco - 42.24e6) > 1e-9 * 42.24e6) v.fail(v.detail);
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c10_determinism() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "dcflex_acceptance";
  fs::remove_all(root);
  cli::ExperimentConfig c;
  c.synth.buses = 5;
  c.synth.datacenters = 2;
  c.synth.days = 6;
  c.seed = 3;
  c.budgets = {0.0, 0.5, 1.0};
  c.out = root / "a";
  c.jobs = 1;
  cli::cmd_simulate(c);
  c.out = root / "b";
  c.jobs = 4;
  cli::cmd_simulate(c);
  std::size_t bytes = 0;
  for (const char* f : {"outcomes.csv", "loads.csv", "distribution.csv"}) {
    const auto a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    bytes += a.size();
    if (a != b || a.empty()) v.fail(fmt::format("{} differs", f));
  }
  if (v.pass) v.detail = fmt::format("two runs, {} bytes compared, identical", bytes);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"DC-OPF oracle on the 2-bus congestion instance", c1_oracle},
      {"penalty LMP under forced shedding", c2_shedding},
      {"flexibility constraints on 100 random days x all approaches", c3_flexibility},
      {"cost ordering and deviation shrinkage on the toy sweep", c4_ordering},
      {"OptDist <= EvenDist and GridCtrl monotone in budget", c5_optdist},
      {"full-budget gains with diminishing returns on a solar grid", c6_shape},
      {"overshifting: PlanShare costlier than PS-GridScale", c7_overshifting},
      {"Act conservation and GM self-consistency", c8_act},
      {"battery TCO worked example", c9_tco},
      {"byte-identical simulate output", c10_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(fmt::format("threw: {}", e.what()));
    }
    failed += v.pass ? 0 : 1;
    fmt::print("criterion {:>2}: {} - {} ({}) [{:.1f} s]\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
               v.detail, seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
