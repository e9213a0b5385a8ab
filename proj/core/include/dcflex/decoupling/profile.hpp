#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcflex/grid/grid.hpp"
#include "dcflex/lp/model.hpp"

namespace dcflex::decoupling {

using grid::Datacenter;
using grid::Grid;

// Surplus/deficit of a grid-load series against the constant DCPower_avg.
struct DecouplingProfile {
  Eigen::VectorXd power_surplus;  // (load - avg)+ per hour, MW
  Eigen::VectorXd power_deficit;  // (avg - load)+ per hour, MW
  Eigen::VectorXd net_energy;     // running sum of surplus - deficit, MWh
  double energy_surplus = 0.0;    // MWh over the day
  double energy_deficit = 0.0;

  // Battery activity used to apportion carbon reductions.
  double energy_moved() const { return energy_surplus + energy_deficit; }
};

// Throws std::invalid_argument for a negative or non-finite load value.
DecouplingProfile decoupling_profile(const Eigen::VectorXd& grid_load, const Datacenter& dc);

// DCPower_max * (util_avg - util_min), MW.
double max_power_deficit(const Datacenter& dc);

// Flexibility checks on a finalized series; each returns the worst violation
// (0 when satisfied).
double range_violation(const Eigen::VectorXd& grid_load, const Datacenter& dc);  // MW
double net_energy_violation(const Eigen::VectorXd& grid_load, const Datacenter& dc);  // MWh

struct DecouplingAllocation {
  std::vector<std::string> dc_ids;
  Eigen::VectorXd energy_cap;  // decpEn-max per DC, MWh
  Eigen::VectorXd power_cap;   // decpPow-max per DC, MW
  double total = 0.0;          // budget the caps were drawn from, MWh

  std::size_t size() const { return dc_ids.size(); }
  // Throws std::invalid_argument when ids do not match the grid's
  // datacenters, a cap is negative, or the caps exceed the total.
  void validate(const Grid& grid) const;
};

// Unbounded energy caps (no budget constraint).
DecouplingAllocation unlimited_allocation(const Grid& grid);

// CSV: dc_id,energy_cap_mwh,power_cap_mw. Loading sets total to the cap sum.
std::string allocation_to_csv(const DecouplingAllocation& alloc);
void save_allocation(const DecouplingAllocation& alloc, const std::filesystem::path& path);
DecouplingAllocation load_allocation(const Grid& grid, const std::filesystem::path& path);

// LP encoding of one datacenter's flexible grid load over a day: hourly load
// variables within [util_min, util_max] * max, prefix net-energy rows (never
// positive, zero at the end) and positive-part deficit variables
// def_t >= avg - load_t whose sum is bounded by `cap`. The cap is an
// expression so a planning LP can make it a variable; an infinite constant
// cap adds no row.
struct FlexibleLoad {
  std::vector<lp::VarId> load;
  std::vector<lp::VarId> deficit;
  std::vector<lp::LinearExpr> load_expr() const;
};

struct FlexibleLoadOptions {
  // Objective weight on each MWh of deficit; a small value makes the LP
  // prefer the least battery use among equal-cost dispatches.
  double deficit_penalty = 0.0;
};

FlexibleLoad add_flexible_load(lp::Model& model, const Datacenter& dc, int hours,
                               const lp::LinearExpr& cap, const std::string& prefix,
                               const FlexibleLoadOptions& options = {});

}  // namespace dcflex::decoupling
