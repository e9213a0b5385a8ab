#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::string config;
  std::string grid, budgets, methods, approaches, out, economics;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_frac, step_fraction, wind, solar;
  std::optional<int> jobs, buses, dcs, days, hours;
  bool renewables = false;
};

dcflex::cli::ExperimentConfig resolve(const Overrides& o) {
  using namespace dcflex::cli;
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_experiment(o.config);
  if (!o.grid.empty()) c.grid = o.grid;
  if (!o.budgets.empty()) c.budgets = parse_budget_list(o.budgets);
  if (!o.methods.empty()) c.methods = parse_method_list(o.methods);
  if (!o.approaches.empty()) c.approaches = parse_approach_list(o.approaches);
  if (!o.out.empty()) c.out = o.out;
  if (!o.economics.empty()) c.economics = o.economics;
  if (o.seed) c.seed = *o.seed;
  if (o.train_frac) c.train_frac = *o.train_frac;
  if (o.step_fraction) c.step_fraction = *o.step_fraction;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.buses) c.synth.buses = *o.buses;
  if (o.dcs) c.synth.datacenters = *o.dcs;
  if (o.days) c.synth.days = *o.days;
  if (o.hours) c.synth.hours = *o.hours;
  if (o.wind) c.synth.wind_pct = *o.wind;
  if (o.solar) c.synth.solar_pct = *o.solar;
  if (o.renewables) c.renewable_comparison = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Datacenter load flexibility experiments on a DC-OPF grid model"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config, "Experiment INI file");
  app.add_option("--grid", o.grid, "grid.json (profiles.csv and scenarios.csv alongside)");
  app.add_option("--seed", o.seed, "Seed for the synthetic grid and the train/eval split");
  app.add_option("--budgets", o.budgets, "Comma-separated budget fractions in [0,1]");
  app.add_option("--methods", o.methods, "Comma-separated distribution methods: even, opt");
  app.add_option("--approaches", o.approaches, "Comma-separated: fixed, planshare, ps-gridscale, gridctrl");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--train-frac", o.train_frac, "Training share of the scenario days (default 0.8)");
  app.add_option("--jobs", o.jobs, "Worker threads");
  app.add_option("--economics", o.economics, "Economics INI file");
  app.add_option("--step-fraction", o.step_fraction, "PlanShare hourly step limit as a share of power_max");
  app.add_flag("--renewables", o.renewables, "Also price the renewable build-out with the same carbon cut");
  app.add_option("--buses", o.buses, "Synthetic grid: buses");
  app.add_option("--dcs", o.dcs, "Synthetic grid: datacenters");
  app.add_option("--days", o.days, "Synthetic grid: scenario days");
  app.add_option("--hours", o.hours, "Synthetic grid: hours per day");
  app.add_option("--wind", o.wind, "Synthetic grid: wind share of demand, %");
  app.add_option("--solar", o.solar, "Synthetic grid: solar share of demand, %");

  auto* synth = app.add_subcommand("synth", "Write a synthetic grid and its scenarios");
  auto* distribute = app.add_subcommand("distribute", "Write allocation files per budget and method");
  auto* simulate = app.add_subcommand("simulate", "Simulate every approach on the evaluation days");
  auto* report = app.add_subcommand("report", "Aggregate simulate output into summary tables");
  for (auto* sub : {synth, distribute, simulate, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    const auto cfg = resolve(o);
    if (synth->parsed()) dcflex::cli::cmd_synth(cfg);
    if (distribute->parsed()) dcflex::cli::cmd_distribute(cfg);
    if (simulate->parsed()) dcflex::cli::cmd_simulate(cfg);
    if (report->parsed()) dcflex::cli::cmd_report(cfg.out, cfg.economics);
  } catch (const dcflex::grid::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntimeFailure;
  }
  return 0;
}
