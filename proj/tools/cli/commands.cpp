#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "dcflex/decoupling/distribution.hpp"
#include "dcflex/economics/economics.hpp"
#include "dcflex/util/csv.hpp"
#include "dcflex/util/parallel.hpp"

namespace dcflex::cli {

namespace fs = std::filesystem;
using grid::format_double;
using grid::ValidationError;
using management::Approach;

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

economics::EconomicsConfig economics_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  if (!fs::is_regular_file(*path)) throw ValidationError(fmt::format("economics config not found: {}", path->string()));
  return economics::load_config(*path);
}

decoupling::FlexSolveOptions flex_options(const ExperimentConfig& cfg) {
  decoupling::FlexSolveOptions o;
  o.jobs = cfg.jobs;
  return o;
}

Distribution distribute(const ExperimentConfig& cfg, const Instance& x) {
  const auto train = x.scenarios.train();
  if (train.empty()) throw ValidationError("the training split is empty");
  const auto opts = flex_options(cfg);
  Distribution d;
  d.need = decoupling::decoupling_need(x.grid, train, opts);
  fmt::print(stderr, "decoupling need {:.3f} MWh over {} training days\n", d.need, train.size());
  for (double b : cfg.budgets) {
    const double total = b * d.need;
    for (Method m : cfg.methods) {
      AllocationRun r;
      r.budget = b;
      r.method = m;
      r.alloc = m == Method::kEven ? decoupling::even_distribution(x.grid, total)
                                   : decoupling::optimized_distribution(x.grid, train, total, opts).alloc;
      r.train_cost = decoupling::solve_flexible_days(x.grid, train, r.alloc, opts).weighted_cost;
      fmt::print(stderr, "budget {} {}: train cost {:.2f} $/day\n", format_double(b), to_string(m), r.train_cost);
      d.runs.push_back(std::move(r));
    }
    // OptDist should never lose to the even split on the days it was fit to.
    const AllocationRun* even = nullptr;
    const AllocationRun* opt = nullptr;
    for (auto it = d.runs.end() - static_cast<std::ptrdiff_t>(cfg.methods.size()); it != d.runs.end(); ++it) {
      (it->method == Method::kEven ? even : opt) = &*it;
    }
    if (even && opt) {
      const bool ok = opt->train_cost <= even->train_cost * (1 + 1e-6) + 1e-6;
      fmt::print(stderr, "budget {}: opt {} even ({:.2f} vs {:.2f})\n", format_double(b), ok ? "<=" : "> !!",
                 opt->train_cost, even->train_cost);
    }
  }
  return d;
}

void write_distribution(const ExperimentConfig& cfg, const Distribution& d) {
  std::string table = "budget,method,total_mwh,need_mwh,train_weighted_cost_usd\n";
  for (const AllocationRun& r : d.runs) {
    write_atomic(allocation_path(cfg.out, r.method, r.budget), decoupling::allocation_to_csv(r.alloc));
    table += fmt::format("{},{},{},{},{}\n", format_double(r.budget), to_string(r.method),
                         format_double(r.alloc.energy_cap.sum()), format_double(d.need),
                         format_double(r.train_cost));
  }
  write_atomic(cfg.out / "distribution.csv", table);
}

}  // namespace

fs::path allocation_path(const fs::path& out, Method m, double budget) {
  return out / "allocations" / fmt::format("{}_{}.csv", to_string(m), format_double(budget));
}

void cmd_synth(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.grid.reset();
  const Instance x = load_instance(c);
  fs::create_directories(cfg.out);
  write_atomic(cfg.out / "grid.json", grid::grid_to_json(x.grid));
  grid::save_scenarios(x.grid, x.scenarios, cfg.out / "profiles.csv", cfg.out / "scenarios.csv");
  fmt::print(stderr, "wrote {} buses, {} datacenters, {} days to {} (renewable share {:.1f}%)\n",
             x.grid.buses.size(), x.grid.datacenters.size(), x.scenarios.days.size(), cfg.out.string(),
             100 * grid::renewable_fraction(x.grid, x.scenarios));
}

Distribution cmd_distribute(const ExperimentConfig& cfg) {
  const Instance x = load_instance(cfg);
  Distribution d = distribute(cfg, x);
  write_distribution(cfg, d);
  return d;
}

namespace {

struct Task {
  std::size_t day = 0;
  std::size_t run = 0;
  Approach approach = Approach::kFixed;
};

void add_row(std::string& out, const std::string& prefix, const std::string& entity, const std::string& metric,
             double value) {
  out += fmt::format("{},{},{},{}\n", prefix, entity, metric, format_double(value));
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg) {
  const Instance x = load_instance(cfg);
  const auto econ = economics_config(cfg.economics);
  const Distribution dist = distribute(cfg, x);
  write_distribution(cfg, dist);

  std::vector<grid::DayScenario> days = x.scenarios.eval();
  if (days.empty()) throw ValidationError("the evaluation split is empty");
  std::sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  grid::assign_week_weights(days);

  management::SimulateOptions sim;
  sim.step_fraction = cfg.step_fraction;
  sim.rates = econ.rates;

  // Fixed loads do not depend on the allocation: one outcome per day.
  std::vector<management::DayOutcome> fixed(days.size());
  detail::parallel_for(days.size(), cfg.jobs, [&](std::size_t d) {
    fixed[d] = management::simulate_day(x.grid, days[d], decoupling::unlimited_allocation(x.grid), Approach::kFixed,
                                        sim);
  });

  std::vector<Task> tasks;
  for (std::size_t d = 0; d < days.size(); ++d) {
    for (std::size_t r = 0; r < dist.runs.size(); ++r) {
      for (Approach a : cfg.approaches) {
        if (a != Approach::kFixed) tasks.push_back({d, r, a});
      }
    }
  }
  std::vector<management::DayOutcome> results(tasks.size());
  detail::parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
    const Task& t = tasks[k];
    try {
      results[k] = management::simulate_day(x.grid, days[t.day], dist.runs[t.run].alloc, t.approach, sim);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("scenario '{}' ({}): {}", days[t.day].id,
                                           management::to_string(t.approach), e.what()));
    }
  });
  std::map<std::tuple<std::size_t, std::size_t, Approach>, const management::DayOutcome*> lookup;
  for (std::size_t k = 0; k < tasks.size(); ++k) lookup[{tasks[k].day, tasks[k].run, tasks[k].approach}] = &results[k];

  std::string outcomes = "scenario_id,weight,budget,method,approach,entity,metric,value\n";
  std::string loads = "scenario_id,budget,method,approach,dc_id,hour,load_mw\n";
  // Per (run, approach): daily grid reductions for the renewable comparison.
  std::map<std::pair<std::size_t, Approach>, std::vector<double>> reductions;
  for (std::size_t d = 0; d < days.size(); ++d) {
    for (std::size_t r = 0; r < dist.runs.size(); ++r) {
      for (Approach a : management::kAllApproaches) {
        if (std::find(cfg.approaches.begin(), cfg.approaches.end(), a) == cfg.approaches.end()) continue;
        const management::DayOutcome& o = a == Approach::kFixed ? fixed[d] : *lookup.at({d, r, a});
        const AllocationRun& run = dist.runs[r];
        const std::string key = fmt::format("{},{},{}", format_double(run.budget), to_string(run.method),
                                            management::to_string(a));
        const std::string prefix = fmt::format("{},{},{}", days[d].id, format_double(days[d].weight), key);
        const auto ledger = economics::carbon_ledger(fixed[d], o);
        if (ledger.act.equal_split) {
          fmt::print(stderr, "warning: scenario '{}' {}: carbon changed by {} kg with no decoupling energy; "
                             "splitting equally\n", days[d].id, key, ledger.act.delta);
        }
        for (const auto& m : management::outcome_metrics(x.grid, o)) add_row(outcomes, prefix, m.entity, m.metric, m.value);
        add_row(outcomes, prefix, "grid", "cost_reduction_usd", fixed[d].grid_cost - o.grid_cost);
        add_row(outcomes, prefix, "grid", "carbon_reduction_kg", ledger.act.delta);
        add_row(outcomes, prefix, "grid", "act_equal_split", ledger.act.equal_split ? 1.0 : 0.0);
        for (std::size_t i = 0; i < x.grid.datacenters.size(); ++i) {
          const auto k = static_cast<Eigen::Index>(i);
          const grid::Datacenter& dc = x.grid.datacenters[i];
          const auto& p = o.profiles[i];
          add_row(outcomes, prefix, dc.id, "power_cost_savings_usd", fixed[d].dc_power_cost(k) - o.dc_power_cost(k));
          add_row(outcomes, prefix, dc.id, "gm_fixed_carbon_kg", ledger.gm.fixed(k));
          add_row(outcomes, prefix, dc.id, "gm_reduction_kg", ledger.gm.reduction(k));
          add_row(outcomes, prefix, dc.id, "act_reduction_kg", ledger.act.reduction(k));
          add_row(outcomes, prefix, dc.id, "energy_moved_mwh", p.energy_moved());
          add_row(outcomes, prefix, dc.id, "max_power_deficit_mw", p.power_deficit.maxCoeff());
          add_row(outcomes, prefix, dc.id, "mean_lmp_usd_per_mwh", o.actual.lmp.row(dc.bus).mean());
          for (int t = 0; t < o.loads.cols(); ++t) {
            loads += fmt::format("{},{},{},{},{}\n", days[d].id, key, dc.id, t + 1, format_double(o.loads(k, t)));
          }
        }
        if (a != Approach::kFixed) reductions[{r, a}].push_back(ledger.act.delta);
      }
    }
  }
  write_atomic(cfg.out / "outcomes.csv", outcomes);
  write_atomic(cfg.out / "loads.csv", loads);

  if (cfg.renewable_comparison) {
    std::string table =
        "budget,method,approach,target_kg_per_day,achievable,scale,added_wind_mwh_per_day,"
        "added_solar_mwh_per_day,annual_cost_usd\n";
    economics::RenewableOptions ro;
    ro.jobs = cfg.jobs;
    ro.tolerance = 1e-4;
    for (const auto& [key, values] : reductions) {
      const AllocationRun& run = dist.runs[key.first];
      const double target = std::max(0.0, grid::weighted_mean(days, values));
      const auto re = economics::renewable_equivalent_cost(x.grid, days, target, econ, ro);
      table += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_double(run.budget), to_string(run.method),
                           management::to_string(key.second), format_double(target), re.achievable ? 1 : 0,
                           format_double(re.scale), format_double(re.added_wind), format_double(re.added_solar),
                           format_double(re.annual_cost));
    }
    write_atomic(cfg.out / "renewable_equivalent.csv", table);
  }
  fmt::print(stderr, "simulated {} eval days x {} allocations x {} approaches into {}\n", days.size(),
             dist.runs.size(), cfg.approaches.size(), cfg.out.string());
}

namespace {

struct Group {
  std::string budget, method, approach;
  // scenario -> (weight, (entity, metric) -> value)
  std::map<std::string, std::pair<double, std::map<std::pair<std::string, std::string>, double>>> days;
};

double weighted(const Group& g, const std::string& entity, const std::string& metric) {
  double num = 0.0, den = 0.0;
  for (const auto& [id, day] : g.days) {
    const auto it = day.second.find({entity, metric});
    if (it == day.second.end()) {
      throw ValidationError(fmt::format("outcomes.csv: scenario '{}' lacks {} {}", id, entity, metric));
    }
    num += day.first * it->second;
    den += day.first;
  }
  return num / den;
}

std::vector<double> series(const Group& g, const std::string& entity, const std::string& metric) {
  std::vector<double> out;
  for (const auto& [id, day] : g.days) out.push_back(day.second.at({entity, metric}));
  return out;
}

std::vector<double> weights(const Group& g) {
  std::vector<double> out;
  for (const auto& [id, day] : g.days) out.push_back(day.first);
  return out;
}

}  // namespace

void cmd_report(const fs::path& dir, const std::optional<fs::path>& economics_path) {
  const fs::path path = dir / "outcomes.csv";
  if (!fs::is_regular_file(path)) {
    throw ValidationError(fmt::format("no simulation output in '{}' (missing outcomes.csv)", dir.string()));
  }
  const auto econ = economics_config(economics_path);
  const csv::CsvTable t = csv::read_csv(path);
  t.require_header({"scenario_id", "weight", "budget", "method", "approach", "entity", "metric", "value"});
  if (t.rows.empty()) throw ValidationError(fmt::format("{}: no outcome rows", path.string()));

  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  std::vector<std::string> dcs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string key = row[2] + "," + row[3] + "," + row[4];
    auto [it, fresh] = index.try_emplace(key, groups.size());
    if (fresh) groups.push_back({row[2], row[3], row[4], {}});
    auto& day = groups[it->second].days[row[0]];
    day.first = csv::parse_number(row[1], path, r + 2);
    day.second[{row[5], row[6]}] = csv::parse_number(row[7], path, r + 2);
    if (row[5] != "grid" && std::find(dcs.begin(), dcs.end(), row[5]) == dcs.end()) dcs.push_back(row[5]);
  }

  std::string grid_table =
      "budget,method,approach,dispatch_cost_usd,carbon_kg,curtailed_renewable_mwh,shed_mwh,cost_reduction_usd,"
      "carbon_reduction_kg\n";
  std::string carbon_table = "budget,method,approach,dc_id,fixed_kg,gm_kg,gm_reduction_kg,act_reduction_kg\n";
  std::string bc_table =
      "budget,method,approach,dc_id,basis,power_savings_usd_per_yr,carbon_reduction_t_per_yr,"
      "carbon_value_usd_per_yr,energy_cap_mwh,power_max_mw,cycles_per_day,loss_cost_usd_per_yr,tco_usd_per_yr,"
      "benefit_cost\n";
  for (const Group& g : groups) {
    const std::string key = fmt::format("{},{},{}", g.budget, g.method, g.approach);
    grid_table += fmt::format("{},{},{},{},{},{},{}\n", key, format_double(weighted(g, "grid", "dispatch_cost_usd")),
                              format_double(weighted(g, "grid", "carbon_kg")),
                              format_double(weighted(g, "grid", "curtailed_renewable_mwh")),
                              format_double(weighted(g, "grid", "shed_mwh")),
                              format_double(weighted(g, "grid", "cost_reduction_usd")),
                              format_double(weighted(g, "grid", "carbon_reduction_kg")));
    for (const std::string& dc : dcs) {
      carbon_table += fmt::format("{},{},{},{},{},{}\n", key, dc, format_double(weighted(g, dc, "gm_fixed_carbon_kg")),
                                  format_double(weighted(g, dc, "carbon_kg")),
                                  format_double(weighted(g, dc, "gm_reduction_kg")),
                                  format_double(weighted(g, dc, "act_reduction_kg")));
    }
    if (g.approach == management::to_string(Approach::kFixed)) continue;

    // Battery sized from the allocation the run used.
    const fs::path alloc_path = allocation_path(dir, parse_method(g.method), csv::parse_number(g.budget, path, 0));
    const csv::CsvTable alloc = csv::read_csv(alloc_path);
    alloc.require_header({"dc_id", "energy_cap_mwh", "power_cap_mw"});
    std::map<std::string, std::pair<double, double>> caps;
    for (std::size_t r = 0; r < alloc.rows.size(); ++r) {
      caps[alloc.rows[r][0]] = {csv::parse_number(alloc.rows[r][1], alloc_path, r + 2),
                                csv::parse_number(alloc.rows[r][2], alloc_path, r + 2)};
    }
    for (const std::string& dc : dcs) {
      const auto cap = caps.find(dc);
      if (cap == caps.end()) throw ValidationError(fmt::format("{}: no row for '{}'", alloc_path.string(), dc));
      const auto deficit = series(g, dc, "energy_deficit_mwh");
      const auto power = series(g, dc, "max_power_deficit_mw");
      const double cap_e = std::isfinite(cap->second.first) ? cap->second.first
                                                            : *std::max_element(deficit.begin(), deficit.end());
      const double cap_p = std::isfinite(cap->second.second) ? cap->second.second
                                                             : *std::max_element(power.begin(), power.end());
      const auto battery = economics::size_battery(cap_e, cap_p, econ.battery);
      double cycles = 0.0, loss = 0.0, tco = 0.0;
      if (battery) {
        cycles = economics::cycle_count(deficit, *battery, weights(g));
        loss = economics::loss_cost(*battery, weighted(g, dc, "energy_deficit_mwh"),
                                    weighted(g, dc, "mean_lmp_usd_per_mwh"), econ.days_per_year);
        tco = economics::bes_tco(*battery, cycles, loss);
      }
      const double savings = weighted(g, dc, "power_cost_savings_usd") * econ.days_per_year;
      for (const char* basis : {"gm", "act"}) {
        const double reduction =
            weighted(g, dc, std::string(basis) + "_reduction_kg") * econ.days_per_year / 1000.0;
        const std::string ratio =
            battery ? format_double(economics::benefit_cost_ratio(savings, reduction, econ.carbon_price, tco)) : "";
        bc_table += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", key, dc, basis, format_double(savings),
                                format_double(reduction), format_double(reduction * econ.carbon_price),
                                format_double(battery ? battery->energy_cap : 0.0),
                                format_double(battery ? battery->power_max : 0.0), format_double(cycles),
                                format_double(loss), format_double(tco), ratio);
      }
    }
  }
  write_atomic(dir / "report" / "grid_vs_budget.csv", grid_table);
  write_atomic(dir / "report" / "dc_carbon.csv", carbon_table);
  write_atomic(dir / "report" / "dc_benefit_cost.csv", bc_table);
  fmt::print(stderr, "wrote {} groups to {}\n", groups.size(), (dir / "report").string());
}

}  // namespace dcflex::cli
