#pragma once

#include <vector>

#include "dcflex/decoupling/profile.hpp"
#include "dcflex/dispatch/dcopf.hpp"
#include "dcflex/grid/scenario.hpp"

namespace dcflex::decoupling {

using dispatch::DispatchResult;
using grid::DayScenario;

enum class EvenMode { kEqual, kLoadProportional };

// Throws std::invalid_argument when the grid has no datacenters or the
// total is negative.
DecouplingAllocation even_distribution(const Grid& grid, double total, EvenMode mode = EvenMode::kEqual);

// $/MWh on deficit energy; among dispatches of equal cost the LP then picks
// the one using the least battery energy, instead of an arbitrary vertex.
inline constexpr double kDeficitTieBreak = 1e-6;

struct FlexSolveOptions {
  dispatch::DispatchOptions dispatch;
  // See FlexibleLoadOptions::deficit_penalty.
  double deficit_penalty = kDeficitTieBreak;
  // Worker threads for independent per-day solves (1: sequential).
  int jobs = 1;
};

// Grid-controlled dispatch of one day: DC loads are LP variables limited by
// the flexibility rows and each DC's energy cap.
DispatchResult solve_flexible_day(const Grid& grid, const DayScenario& day,
                                  const DecouplingAllocation& alloc,
                                  const FlexSolveOptions& options = {});

struct DaysResult {
  std::vector<DispatchResult> days;
  double weighted_cost = 0.0;  // sum w_d cost_d / sum w_d
  // Largest daily deficit per DC over the days, MWh.
  Eigen::VectorXd max_deficit;
};

// solve_flexible_day over a set of days with fixed caps.
DaysResult solve_flexible_days(const Grid& grid, const std::vector<DayScenario>& days,
                               const DecouplingAllocation& alloc,
                               const FlexSolveOptions& options = {});

// Fixed DCPower_avg loads over a set of days.
DaysResult solve_fixed_days(const Grid& grid, const std::vector<DayScenario>& days,
                            const FlexSolveOptions& options = {});

// Sum over DCs of the largest daily deficit under unbudgeted GridCtrl on
// `train`; the reference that normalized budgets are fractions of.
double decoupling_need(const Grid& grid, const std::vector<DayScenario>& train,
                       const FlexSolveOptions& options = {});

struct OptDistResult {
  DecouplingAllocation alloc;
  double weighted_cost = 0.0;  // optimal joint objective, normalized by sum w_d
  std::vector<DispatchResult> days;
};

// Joint stochastic LP over the training days: cap variables with
// sum(cap) <= total and per-day deficits <= cap, minimizing the weighted
// dispatch cost. Returned caps are tightened to the largest realized daily
// deficit, which keeps every training-day solution feasible.
OptDistResult optimized_distribution(const Grid& grid, const std::vector<DayScenario>& train,
                                     double total, const FlexSolveOptions& options = {});

}  // namespace dcflex::decoupling
