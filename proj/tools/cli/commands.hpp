#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "dcflex/decoupling/profile.hpp"
#include "experiment.hpp"

namespace dcflex::cli {

struct AllocationRun {
  double budget = 0.0;  // fraction of the decoupling need
  Method method = Method::kEven;
  decoupling::DecouplingAllocation alloc;
  double train_cost = 0.0;  // weighted GridCtrl cost on the training days, $/day
};

struct Distribution {
  double need = 0.0;  // MWh
  std::vector<AllocationRun> runs;
};

// Writes grid.json, scenarios.csv and profiles.csv of the synthetic grid to cfg.out.
void cmd_synth(const ExperimentConfig& cfg);

// One allocation file per (budget, method) under cfg.out/allocations plus
// distribution.csv. Returns what it wrote.
Distribution cmd_distribute(const ExperimentConfig& cfg);

// Allocations as above, then every (eval day, budget, method, approach):
// outcomes.csv and loads.csv, optionally renewable_equivalent.csv.
void cmd_simulate(const ExperimentConfig& cfg);

// Aggregates cfg.out's simulate output into report/grid_vs_budget.csv,
// report/dc_carbon.csv and report/dc_benefit_cost.csv.
void cmd_report(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& economics);

std::filesystem::path allocation_path(const std::filesystem::path& out, Method m, double budget);

}  // namespace dcflex::cli
