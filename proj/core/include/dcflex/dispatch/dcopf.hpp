#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcflex/grid/grid.hpp"
#include "dcflex/grid/scenario.hpp"
#include "dcflex/lp/model.hpp"
#include "dcflex/lp/solver.hpp"

namespace dcflex::dispatch {

using grid::DayScenario;
using grid::Fuel;
using grid::Grid;

// kg CO2 per MWh by fuel.
struct EmissionRates {
  std::array<double, grid::kFuelCount> rate{0.0, 1001.0, 429.0, 0.0, 0.0, 0.0, 0.0};

  double operator[](Fuel f) const { return rate[static_cast<std::size_t>(f)]; }
  double& operator[](Fuel f) { return rate[static_cast<std::size_t>(f)]; }
  // Throws std::invalid_argument for a negative rate or nonzero wind/solar.
  void validate() const;
};

struct DispatchOptions {
  // Output at the hour before the horizon, one per generator. When absent the
  // first-hour ramp constraint is skipped.
  std::optional<std::vector<double>> initial_output;
  lp::SolverOptions solver;
};

// Every matrix is entity x hour; one period is one hour, so MW and MWh
// per period coincide.
struct DispatchResult {
  Eigen::MatrixXd generation;   // generators
  Eigen::MatrixXd flow;         // lines, from -> to positive
  Eigen::MatrixXd angle;        // buses, rad
  Eigen::MatrixXd shed_load;    // non-DC loads
  Eigen::MatrixXd shed_dc;      // datacenters
  Eigen::MatrixXd curt_import;
  Eigen::MatrixXd curt_wind;
  Eigen::MatrixXd curt_solar;
  Eigen::MatrixXd curt_other;
  Eigen::MatrixXd lmp;          // buses, $/MWh
  Eigen::MatrixXd dc_load;      // datacenters, grid load requested
  Eigen::MatrixXd gen_by_fuel;  // kFuelCount x hour, delivered energy
  double cost = 0.0;            // generation + penalties, $

  int hours() const { return static_cast<int>(lmp.cols()); }
  // Served demand per hour (non-DC plus DC, net of shedding).
  Eigen::VectorXd served_load() const;
  double fuel_total(Fuel f) const { return gen_by_fuel.row(static_cast<Eigen::Index>(f)).sum(); }
};

// Handles to the variables and rows one DC-OPF block adds to a model.
struct DcopfBlock {
  std::vector<std::vector<lp::VarId>> p, theta, flow, shed_load, shed_dc;
  std::vector<std::vector<lp::VarId>> curt_import, curt_wind, curt_solar, curt_other;
  std::vector<std::vector<lp::RowId>> balance;  // [bus][hour]
  std::vector<std::vector<lp::LinearExpr>> dc_load;
};

// Appends the DC-OPF of one day to `model` with DC grid loads given as
// affine expressions (constants for fixed loads, variables for flexible
// ones). Objective terms are multiplied by `objective_scale`, which lets
// several days share one model. Row and variable names get `prefix`.
DcopfBlock add_dcopf(lp::Model& model, const Grid& grid, const DayScenario& day,
                     const std::vector<std::vector<lp::LinearExpr>>& dc_load,
                     double objective_scale = 1.0, const std::string& prefix = {},
                     const DispatchOptions& options = {});

// Reads a block back out of a solved model. LMPs are the balance duals
// divided by `objective_scale`.
DispatchResult extract_dispatch(const Grid& grid, const DayScenario& day, const DcopfBlock& block,
                                const lp::Solution& solution, double objective_scale = 1.0);

// dc_load is datacenter x hour MW.
lp::Model formulate_dcopf(const Grid& grid, const DayScenario& day, const Eigen::MatrixXd& dc_load,
                          const DispatchOptions& options = {});

// Throws grid::ValidationError on bad inputs and lp::SolverError if the LP is
// not optimal (it always has a feasible point through the penalty variables).
DispatchResult solve_dispatch(const Grid& grid, const DayScenario& day,
                              const Eigen::MatrixXd& dc_load, const DispatchOptions& options = {});

// Constant DCPower_avg for every datacenter-hour.
Eigen::MatrixXd average_dc_load(const Grid& grid, int hours);

// Sum over hours and fuels of gen_by_fuel * rate, kg.
double grid_carbon(const DispatchResult& result, const EmissionRates& rates);
// Hourly emissions over served load; 0 for an hour with no served load.
Eigen::VectorXd average_carbon_intensity(const DispatchResult& result, const EmissionRates& rates);

// Long CSV: entity,hour,quantity,value (hours 1-based).
std::string dispatch_to_csv(const Grid& grid, const DispatchResult& result);
// JSON object with cost, emissions, and per-fuel / shedding / curtailment totals.
std::string dispatch_summary_json(const DispatchResult& result, const EmissionRates& rates);

}  // namespace dcflex::dispatch
