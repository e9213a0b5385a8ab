#include "dcflex/decoupling/distribution.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dcflex/util/parallel.hpp"

namespace dcflex::decoupling {

using lp::LinearExpr;
using lp::Relation;

DecouplingAllocation even_distribution(const Grid& g, double total, EvenMode mode) {
  if (g.datacenters.empty()) throw std::invalid_argument("grid has no datacenters to allocate to");
  if (!(total >= 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("total decoupling budget must be finite and >= 0");
  }
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  Eigen::VectorXd weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    weight(i) = mode == EvenMode::kEqual ? 1.0 : g.datacenters[i].power_avg();
  }
  if (!(weight.sum() > 0.0)) weight.setOnes();
  DecouplingAllocation a;
  a.total = total;
  a.energy_cap = total * weight / weight.sum();
  // Put the rounding residue on the last entry so the caps sum to the budget.
  a.energy_cap(n - 1) = std::max(0.0, total - a.energy_cap.head(n - 1).sum());
  a.power_cap.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.dc_ids.push_back(g.datacenters[i].id);
    a.power_cap(i) = max_power_deficit(g.datacenters[i]);
  }
  return a;
}

namespace {

double daily_deficit(const DispatchResult& r, const Grid& g, std::size_t i) {
  return decoupling_profile(r.dc_load.row(static_cast<Eigen::Index>(i)).transpose(), g.datacenters[i])
      .energy_deficit;
}

[[noreturn]] void lp_failure(const std::string& what, const lp::Model& m, lp::Status status) {
  throw lp::SolverError(fmt::format("{} ended {} ({} rows, {} columns, {} nonzeros)", what,
                                    lp::to_string(status), m.num_constraints(), m.num_variables(),
                                    m.num_nonzeros()));
}

}  // namespace

DispatchResult solve_flexible_day(const Grid& g, const DayScenario& day, const DecouplingAllocation& alloc,
                                  const FlexSolveOptions& options) {
  alloc.validate(g);
  const int T = day.hours();
  lp::Model m;
  std::vector<std::vector<LinearExpr>> loads;
  FlexibleLoadOptions flex;
  flex.deficit_penalty = options.deficit_penalty;
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    loads.push_back(add_flexible_load(m, g.datacenters[i], T, alloc.energy_cap(static_cast<Eigen::Index>(i)),
                                      "", flex)
                        .load_expr());
  }
  const auto block = dispatch::add_dcopf(m, g, day, loads, 1.0, {}, options.dispatch);
  const lp::Solution s = lp::solve(m, options.dispatch.solver);
  if (!s.optimal()) lp_failure(fmt::format("grid-controlled dispatch for '{}'", day.id), m, s.status);
  return dispatch::extract_dispatch(g, day, block, s);
}

namespace {

DaysResult summarize(const Grid& g, const std::vector<DayScenario>& days, std::vector<DispatchResult> results) {
  DaysResult out;
  std::vector<double> costs;
  out.max_deficit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.datacenters.size()));
  for (const DispatchResult& r : results) {
    costs.push_back(r.cost);
    for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
      out.max_deficit(static_cast<Eigen::Index>(i)) =
          std::max(out.max_deficit(static_cast<Eigen::Index>(i)), daily_deficit(r, g, i));
    }
  }
  out.weighted_cost = days.empty() ? 0.0 : grid::weighted_mean(days, costs);
  out.days = std::move(results);
  return out;
}

}  // namespace

DaysResult solve_flexible_days(const Grid& g, const std::vector<DayScenario>& days,
                               const DecouplingAllocation& alloc, const FlexSolveOptions& options) {
  std::vector<DispatchResult> results(days.size());
  detail::parallel_for(days.size(), options.jobs, [&](std::size_t d) {
    results[d] = solve_flexible_day(g, days[d], alloc, options);
  });
  return summarize(g, days, std::move(results));
}

DaysResult solve_fixed_days(const Grid& g, const std::vector<DayScenario>& days,
                            const FlexSolveOptions& options) {
  std::vector<DispatchResult> results(days.size());
  detail::parallel_for(days.size(), options.jobs, [&](std::size_t d) {
    results[d] = dispatch::solve_dispatch(g, days[d], dispatch::average_dc_load(g, days[d].hours()),
                                          options.dispatch);
  });
  return summarize(g, days, std::move(results));
}

double decoupling_need(const Grid& g, const std::vector<DayScenario>& train, const FlexSolveOptions& options) {
  if (train.empty()) throw std::invalid_argument("decoupling need requires at least one training day");
  return solve_flexible_days(g, train, unlimited_allocation(g), options).max_deficit.sum();
}

OptDistResult optimized_distribution(const Grid& g, const std::vector<DayScenario>& train, double total,
                                     const FlexSolveOptions& options) {
  if (train.empty()) throw std::invalid_argument("optimized distribution requires at least one training day");
  if (g.datacenters.empty()) throw std::invalid_argument("grid has no datacenters to allocate to");
  if (!(total >= 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("total decoupling budget must be finite and >= 0");
  }
  double weight_sum = 0.0;
  for (const DayScenario& d : train) weight_sum += d.weight;

  lp::Model m;
  std::vector<lp::VarId> cap;
  LinearExpr cap_sum;
  for (const grid::Datacenter& dc : g.datacenters) {
    cap.push_back(m.add_variable(0.0, lp::kInf, 0.0, fmt::format("cap[{}]", dc.id)));
    cap_sum.add(cap.back(), 1.0);
  }
  m.add_constraint(cap_sum, Relation::kLessEqual, total, "budget");

  FlexibleLoadOptions flex;
  flex.deficit_penalty = options.deficit_penalty;
  std::vector<dispatch::DcopfBlock> blocks;
  std::vector<double> scale;
  for (std::size_t d = 0; d < train.size(); ++d) {
    const std::string prefix = fmt::format("{}.", train[d].id);
    std::vector<std::vector<LinearExpr>> loads;
    for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
      loads.push_back(
          add_flexible_load(m, g.datacenters[i], train[d].hours(), LinearExpr(cap[i]), prefix, flex).load_expr());
    }
    scale.push_back(train[d].weight / weight_sum);
    blocks.push_back(dispatch::add_dcopf(m, g, train[d], loads, scale.back(), train[d].id, options.dispatch));
  }

  const lp::Solution s = lp::solve(m, options.dispatch.solver);
  if (!s.optimal()) lp_failure("optimized distribution", m, s.status);

  OptDistResult out;
  for (std::size_t d = 0; d < train.size(); ++d) {
    out.days.push_back(dispatch::extract_dispatch(g, train[d], blocks[d], s, scale[d]));
    out.weighted_cost += scale[d] * out.days.back().cost;
  }
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  out.alloc.total = total;
  out.alloc.energy_cap = Eigen::VectorXd::Zero(n);
  out.alloc.power_cap.resize(n);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    double used = 0.0;
    for (const DispatchResult& r : out.days) used = std::max(used, daily_deficit(r, g, i));
    // Never above the LP's own cap; solver noise can push the measured value a hair over.
    out.alloc.energy_cap(static_cast<Eigen::Index>(i)) = std::min(used, std::max(0.0, s.value(cap[i])));
    out.alloc.dc_ids.push_back(g.datacenters[i].id);
    out.alloc.power_cap(static_cast<Eigen::Index>(i)) = max_power_deficit(g.datacenters[i]);
  }
  return out;
}

}  // namespace dcflex::decoupling
