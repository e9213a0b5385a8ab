#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dcflex/decoupling/distribution.hpp"
#include "dcflex/decoupling/profile.hpp"
#include "dcflex/dispatch/dcopf.hpp"

namespace dcflex::management {

using decoupling::DecouplingAllocation;
using decoupling::DecouplingProfile;
using dispatch::DispatchResult;
using grid::Datacenter;
using grid::DayScenario;
using grid::Grid;

enum class Approach { kFixed, kPlanShare, kPsGridScale, kGridCtrl };
inline constexpr Approach kAllApproaches[] = {Approach::kFixed, Approach::kPlanShare,
                                             Approach::kPsGridScale, Approach::kGridCtrl};

// "fixed", "planshare", "ps-gridscale", "gridctrl".
std::string_view to_string(Approach a);
// Throws std::invalid_argument listing the accepted names.
Approach parse_approach(std::string_view name);

// Default hourly ramp limit of a PlanShare plan as a fraction of power_max.
inline constexpr double kDefaultStepFraction = 0.25;

// Datacenter-side day-ahead plan: minimizes sum LMP_t * load_t within the
// flexibility rows, the deficit cap and |load_t - load_{t-1}| <= step_size.
// Among price-optimal plans the one with the least deficit energy is
// returned, so flat prices give the constant plan.
Eigen::VectorXd plan_share(const Datacenter& dc, const Eigen::VectorXd& lmp, double cap, double step_size,
                           const lp::SolverOptions& solver = {});

struct ScaledPlan {
  Eigen::MatrixXd alpha;  // datacenter x hour, in [0, 1]
  Eigen::MatrixXd loads;  // finalized grid load
  DispatchResult dispatch;
};

// Grid-side scaling of proposed deviations from DCPower_avg: load =
// avg + alpha * (proposal - avg), chosen inside the dispatch LP. Net energy
// of the finalized loads is constrained to stay non-positive and end at zero.
ScaledPlan ps_gridscale(const Grid& grid, const DayScenario& day, const Eigen::MatrixXd& proposals,
                        const dispatch::DispatchOptions& options = {});

// Grid-optimal loads under the allocation's caps.
DispatchResult grid_ctrl(const Grid& grid, const DayScenario& day, const DecouplingAllocation& alloc,
                         const decoupling::FlexSolveOptions& options = {});

struct SimulateOptions {
  double step_fraction = kDefaultStepFraction;
  decoupling::FlexSolveOptions flex;
  dispatch::EmissionRates rates;
};

struct DayOutcome {
  std::string scenario_id;
  Approach approach = Approach::kFixed;
  Eigen::MatrixXd loads;  // finalized DC grid loads
  std::optional<DispatchResult> day_ahead;  // step 1, fixed DC load
  std::optional<Eigen::MatrixXd> alpha;     // PS-GridScale only
  DispatchResult actual;                     // step 3
  std::vector<DecouplingProfile> profiles;   // per DC
  double grid_cost = 0.0;                    // $
  double grid_carbon = 0.0;                  // kg
  Eigen::VectorXd aci;                       // kg/MWh per hour, actual dispatch
  Eigen::VectorXd dc_power_cost;             // $ per DC at actual LMPs
  Eigen::VectorXd dc_carbon;                 // kg per DC, average-intensity basis
};

// Step 1: dispatch with constant DC loads (prices). Step 2: the management
// approach. Step 3: dispatch with the finalized loads, reported as realized.
DayOutcome simulate_day(const Grid& grid, const DayScenario& day, const DecouplingAllocation& alloc,
                        Approach approach, const SimulateOptions& options = {});

// Flat rows (entity, metric, value) for one outcome: grid totals under entity
// "grid" and per-DC metrics under the DC id.
struct MetricRow {
  std::string entity;
  std::string metric;
  double value = 0.0;
};
std::vector<MetricRow> outcome_metrics(const Grid& grid, const DayOutcome& outcome);

}  // namespace dcflex::management
