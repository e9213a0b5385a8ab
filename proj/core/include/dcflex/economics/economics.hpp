#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcflex/decoupling/profile.hpp"
#include "dcflex/dispatch/dcopf.hpp"
#include "dcflex/management/management.hpp"

namespace dcflex::economics {

using grid::DayScenario;
using grid::Grid;
using management::DayOutcome;

// Li-ion cost settings. Capex in $ (not million $).
struct BatteryCosts {
  double dod = 0.8;
  double rte = 0.85;
  double capex_power = 0.36e6;   // $/MW
  double capex_energy = 0.39e6;  // $/MWh
  double depreciation_years = 15.0;
  void validate() const;
};

struct EconomicsConfig {
  double carbon_price = 280.0;  // $/t CO2
  double lcoe_wind = 50.0;      // $/MWh
  double lcoe_solar = 60.0;     // $/MWh
  double days_per_year = 365.0;
  dispatch::EmissionRates rates;
  BatteryCosts battery;
  void validate() const;
};

// INI file with sections [carbon], [emissions], [lcoe], [battery], [annual].
// Missing keys keep their defaults; unknown sections or keys are rejected with
// grid::ValidationError.
EconomicsConfig load_config(const std::filesystem::path& path);
EconomicsConfig parse_config(const std::string& ini_text, const std::string& origin = "<config>");
std::string config_to_ini(const EconomicsConfig& cfg);

// sum_t lmp_t * load_t. Throws std::invalid_argument on a length mismatch.
double dc_power_cost(const Eigen::VectorXd& load, const Eigen::VectorXd& lmp);

struct GmAllocation {
  Eigen::VectorXd fixed;      // kg per DC, fixed-load ACI and load
  Eigen::VectorXd flexible;   // kg per DC, flexible ACI and load
  Eigen::VectorXd reduction;  // fixed - flexible
};
// Both outcomes must come from the same scenario and grid.
GmAllocation allocate_carbon_gm(const DayOutcome& fixed, const DayOutcome& flex);

struct ActAllocation {
  double delta = 0.0;         // grid kg, fixed - flexible
  Eigen::VectorXd reduction;  // kg per DC, sums to delta
  bool equal_split = false;   // delta != 0 but no DC moved any energy
};
// Splits the grid-level reduction by each DC's deficit + surplus energy.
ActAllocation allocate_carbon_act(const DayOutcome& fixed, const DayOutcome& flex);

struct CarbonLedger {
  std::string scenario_id;
  double grid_fixed = 0.0;  // kg/day
  double grid_flexible = 0.0;
  GmAllocation gm;
  ActAllocation act;
};
CarbonLedger carbon_ledger(const DayOutcome& fixed, const DayOutcome& flex);

struct BatterySpec {
  double power_max = 0.0;   // MW
  double energy_cap = 0.0;  // MWh
  BatteryCosts costs;
  double duration() const { return energy_cap / power_max; }
  // Throws std::invalid_argument unless power, energy > 0 and 0 < DoD, RTE <= 1.
  void validate() const;
};

// energy_cap = deficit_energy / DoD, power_max = deficit_power. Empty when
// either is zero: nothing to build.
std::optional<BatterySpec> size_battery(double deficit_energy, double deficit_power, const BatteryCosts& costs);

// $/yr: capex depreciation plus opex on the system cost, plus loss_cost.
double bes_tco(const BatterySpec& spec, double cycle_avg, double loss_cost);

// Cycles per day: weighted mean daily discharge over energy_cap * DoD.
// Equal weights when `weights` is empty.
double cycle_count(const std::vector<double>& daily_discharge, const BatterySpec& spec,
                   const std::vector<double>& weights = {});

// $/yr of round-trip losses: (1/RTE - 1) * discharge * days * price.
double loss_cost(const BatterySpec& spec, double mean_daily_discharge, double mean_lmp, double days_per_year);

// (savings + carbon_reduction_t * carbon_price) / tco. Throws
// std::domain_error when tco is not positive.
double benefit_cost_ratio(double power_savings, double carbon_reduction_t, double carbon_price, double tco);

enum class CarbonBasis { kGm, kAct };

struct DcBenefit {
  std::string dc_id;
  double power_savings = 0.0;     // $/yr
  double carbon_reduction = 0.0;  // t/yr
  double carbon_value = 0.0;      // $/yr
  double cycles_per_day = 0.0;
  double loss_cost = 0.0;         // $/yr
  std::optional<BatterySpec> battery;
  double tco = 0.0;               // $/yr
  std::optional<double> ratio;    // empty when no battery is needed
};

// Pairs fixed and flexible outcomes by position; both must follow `days`.
// Daily values are annualized as the scenario-weighted mean times
// days_per_year. The battery is sized from the allocation caps, or from the
// largest realized deficit where a cap is unlimited.
std::vector<DcBenefit> benefit_cost(const Grid& grid, const std::vector<DayScenario>& days,
                                    const std::vector<DayOutcome>& fixed, const std::vector<DayOutcome>& flex,
                                    const decoupling::DecouplingAllocation& alloc, const EconomicsConfig& cfg,
                                    CarbonBasis basis = CarbonBasis::kAct);

struct RenewableOptions {
  double max_scale = 10.0;
  int max_iterations = 60;
  double tolerance = 1e-6;  // relative, on the reduction
  dispatch::DispatchOptions dispatch;
  int jobs = 1;
};

struct RenewableEquivalent {
  bool achievable = false;
  double scale = 1.0;         // applied to every wind and solar profile
  double reduction = 0.0;     // kg/day reached
  double added_wind = 0.0;    // MWh/day available
  double added_solar = 0.0;   // MWh/day available
  double annual_cost = 0.0;   // $/yr at LCOE
};

// Scales wind and solar capacity by a common factor with fixed DC loads and
// bisects for the smallest factor reaching `target_reduction` kg/day of
// weighted-mean carbon reduction. Not achievable when the largest scale falls
// short. Throws lp::SolverError if the bisection does not converge.
RenewableEquivalent renewable_equivalent_cost(const Grid& grid, const std::vector<DayScenario>& days,
                                              double target_reduction, const EconomicsConfig& cfg,
                                              const RenewableOptions& options = {});

}  // namespace dcflex::economics
