#include "dcflex/management/management.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dcflex::management {

using lp::LinearExpr;
using lp::Relation;

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::kFixed: return "fixed";
    case Approach::kPlanShare: return "planshare";
    case Approach::kPsGridScale: return "ps-gridscale";
    case Approach::kGridCtrl: return "gridctrl";
  }
  return "unknown";
}

Approach parse_approach(std::string_view name) {
  for (Approach a : kAllApproaches) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument(
      fmt::format("unknown approach '{}' (expected fixed, planshare, ps-gridscale or gridctrl)", name));
}

Eigen::VectorXd plan_share(const Datacenter& dc, const Eigen::VectorXd& lmp, double cap, double step_size,
                           const lp::SolverOptions& solver) {
  const auto T = static_cast<int>(lmp.size());
  if (T == 0) throw std::invalid_argument("plan_share needs at least one price");
  if (!(cap >= 0.0)) throw std::invalid_argument(fmt::format("datacenter '{}': cap must be >= 0", dc.id));
  if (!(step_size >= 0.0)) {
    throw std::invalid_argument(fmt::format("datacenter '{}': step size must be >= 0", dc.id));
  }
  if (!lmp.allFinite()) throw std::invalid_argument(fmt::format("datacenter '{}': non-finite price", dc.id));

  // A finite stand-in for an unlimited cap keeps the deficit variables,
  // which the tie-break stage minimizes.
  const double most = T * (dc.power_avg() - dc.load_min());
  lp::Model m;
  const auto flex = decoupling::add_flexible_load(m, dc, T, std::min(cap, most), "", {});
  for (int t = 1; t < T && std::isfinite(step_size); ++t) {
    m.add_constraint({{flex.load[t], 1.0}, {flex.load[t - 1], -1.0}}, Relation::kLessEqual, step_size);
    m.add_constraint({{flex.load[t], 1.0}, {flex.load[t - 1], -1.0}}, Relation::kGreaterEqual, -step_size);
  }
  LinearExpr cost;
  for (int t = 0; t < T; ++t) cost.add(flex.load[t], lmp(t));
  m.add_objective(cost);

  auto fail = [&](lp::Status s) {
    // The constant plan is always feasible, so this signals numerical trouble.
    throw lp::SolverError(fmt::format(
        "load plan for '{}' ended {}; a step size of at least 0 MW/h with a cap >= 0 should always "
        "admit the constant plan",
        dc.id, lp::to_string(s)));
  };
  const lp::Solution first = lp::solve(m, solver);
  if (!first.optimal()) fail(first.status);

  // Second stage: least deficit among price-optimal plans.
  const double slack = 1e-11 * std::max(1.0, std::abs(first.objective));
  m.add_constraint(cost, Relation::kLessEqual, first.objective + slack, "price_optimal");
  for (lp::VarId v : flex.load) m.set_objective(v, 0.0);
  for (lp::VarId v : flex.deficit) m.set_objective(v, 1.0);
  const lp::Solution second = lp::solve(m, solver);
  const lp::Solution& best = second.optimal() ? second : first;

  Eigen::VectorXd plan(T);
  for (int t = 0; t < T; ++t) plan(t) = best.value(flex.load[t]);
  return plan;
}

ScaledPlan ps_gridscale(const Grid& g, const DayScenario& day, const Eigen::MatrixXd& proposals,
                        const dispatch::DispatchOptions& options) {
  const int T = day.hours();
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  if (proposals.rows() != n || proposals.cols() != T) {
    throw grid::ValidationError(fmt::format("proposal matrix is {}x{}, expected {}x{}", proposals.rows(),
                                            proposals.cols(), n, T));
  }
  lp::Model m;
  std::vector<std::vector<lp::VarId>> alpha(g.datacenters.size());
  std::vector<std::vector<LinearExpr>> loads(g.datacenters.size());
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    const Datacenter& dc = g.datacenters[i];
    const double avg = dc.power_avg();
    std::vector<lp::Term> net;
    for (int t = 0; t < T; ++t) {
      const double dev = proposals(static_cast<Eigen::Index>(i), t) - avg;
      alpha[i].push_back(m.add_variable(0.0, 1.0, 0.0, fmt::format("alpha[{},{}]", dc.id, t + 1)));
      LinearExpr load(avg);
      load.add(alpha[i][t], dev);
      loads[i].push_back(load);
      if (dev != 0.0) net.push_back({alpha[i][t], dev});
      if (!net.empty()) {
        m.add_constraint(net, t + 1 == T ? Relation::kEqual : Relation::kLessEqual, 0.0,
                         fmt::format("net[{},{}]", dc.id, t + 1));
      }
    }
  }
  const auto block = dispatch::add_dcopf(m, g, day, loads, 1.0, {}, options);
  const lp::Solution s = lp::solve(m, options.solver);
  if (!s.optimal()) {
    throw lp::SolverError(fmt::format("scaled dispatch for '{}' ended {} ({} rows, {} columns)", day.id,
                                      lp::to_string(s.status), m.num_constraints(), m.num_variables()));
  }
  ScaledPlan out;
  out.alpha.resize(n, T);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      out.alpha(static_cast<Eigen::Index>(i), t) = std::clamp(s.value(alpha[i][t]), 0.0, 1.0);
    }
  }
  out.dispatch = dispatch::extract_dispatch(g, day, block, s);
  // Rebuilt from the clamped alpha so |load - avg| <= |proposal - avg| holds
  // exactly rather than to solver tolerance.
  out.loads.resize(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double avg = g.datacenters[static_cast<std::size_t>(i)].power_avg();
    for (int t = 0; t < T; ++t) out.loads(i, t) = avg + out.alpha(i, t) * (proposals(i, t) - avg);
  }
  return out;
}

DispatchResult grid_ctrl(const Grid& g, const DayScenario& day, const DecouplingAllocation& alloc,
                         const decoupling::FlexSolveOptions& options) {
  return decoupling::solve_flexible_day(g, day, alloc, options);
}

namespace {

// Solver noise of ~1e-10 MW otherwise shows up as dust in every derived metric.
void snap_loads(const Grid& g, Eigen::MatrixXd& loads) {
  for (Eigen::Index i = 0; i < loads.rows(); ++i) {
    const Datacenter& dc = g.datacenters[static_cast<std::size_t>(i)];
    const double tol = 1e-9 * std::max(1.0, dc.power_max);
    for (Eigen::Index t = 0; t < loads.cols(); ++t) {
      for (double target : {dc.power_avg(), dc.load_min(), dc.load_max()}) {
        if (std::abs(loads(i, t) - target) <= tol) loads(i, t) = target;
      }
    }
  }
}

}  // namespace

DayOutcome simulate_day(const Grid& g, const DayScenario& day, const DecouplingAllocation& alloc,
                        Approach approach, const SimulateOptions& options) {
  alloc.validate(g);
  const int T = day.hours();
  const Eigen::MatrixXd fixed = dispatch::average_dc_load(g, T);
  const auto& dopts = options.flex.dispatch;

  DayOutcome out;
  out.scenario_id = day.id;
  out.approach = approach;
  if (approach != Approach::kGridCtrl) out.day_ahead = dispatch::solve_dispatch(g, day, fixed, dopts);

  switch (approach) {
    case Approach::kFixed:
      out.loads = fixed;
      out.actual = *out.day_ahead;
      break;
    case Approach::kPlanShare:
    case Approach::kPsGridScale: {
      Eigen::MatrixXd plans(fixed.rows(), T);
      for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
        const Datacenter& dc = g.datacenters[i];
        plans.row(static_cast<Eigen::Index>(i)) =
            plan_share(dc, out.day_ahead->lmp.row(dc.bus).transpose(), alloc.energy_cap(static_cast<Eigen::Index>(i)),
                       options.step_fraction * dc.power_max, dopts.solver)
                .transpose();
      }
      snap_loads(g, plans);
      if (approach == Approach::kPlanShare) {
        out.loads = plans;
      } else {
        ScaledPlan scaled = ps_gridscale(g, day, plans, dopts);
        out.loads = scaled.loads;
        snap_loads(g, out.loads);
        out.alpha = std::move(scaled.alpha);
      }
      out.actual = dispatch::solve_dispatch(g, day, out.loads, dopts);
      break;
    }
    case Approach::kGridCtrl:
      out.loads = grid_ctrl(g, day, alloc, options.flex).dc_load;
      snap_loads(g, out.loads);
      out.actual = dispatch::solve_dispatch(g, day, out.loads, dopts);
      break;
  }

  out.grid_cost = out.actual.cost;
  out.grid_carbon = dispatch::grid_carbon(out.actual, options.rates);
  out.aci = dispatch::average_carbon_intensity(out.actual, options.rates);
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  out.dc_power_cost.resize(n);
  out.dc_carbon.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd load = out.loads.row(i).transpose();
    out.profiles.push_back(decoupling::decoupling_profile(load.cwiseMax(0.0), g.datacenters[i]));
    out.dc_power_cost(i) = out.actual.lmp.row(g.datacenters[i].bus).dot(load.transpose());
    out.dc_carbon(i) = out.aci.dot(load);
  }
  return out;
}

std::vector<MetricRow> outcome_metrics(const Grid& g, const DayOutcome& o) {
  const DispatchResult& r = o.actual;
  std::vector<MetricRow> rows = {
      {"grid", "dispatch_cost_usd", o.grid_cost},
      {"grid", "carbon_kg", o.grid_carbon},
      {"grid", "served_mwh", r.served_load().sum()},
      {"grid", "shed_mwh", r.shed_load.sum() + r.shed_dc.sum()},
      {"grid", "curtailed_renewable_mwh", r.curt_wind.sum() + r.curt_solar.sum() + r.curt_other.sum()},
      {"grid", "curtailed_import_mwh", r.curt_import.sum()},
  };
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const std::string& id = g.datacenters[i].id;
    rows.push_back({id, "power_cost_usd", o.dc_power_cost(k)});
    rows.push_back({id, "carbon_kg", o.dc_carbon(k)});
    rows.push_back({id, "grid_energy_mwh", o.loads.row(k).sum()});
    rows.push_back({id, "energy_deficit_mwh", o.profiles[i].energy_deficit});
    rows.push_back({id, "energy_surplus_mwh", o.profiles[i].energy_surplus});
    rows.push_back({id, "shed_mwh", r.shed_dc.row(k).sum()});
  }
  return rows;
}

}  // namespace dcflex::management
