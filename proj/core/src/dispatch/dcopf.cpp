#include "dcflex/dispatch/dcopf.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace dcflex::dispatch {

using lp::LinearExpr;
using lp::Relation;
using lp::VarId;

void EmissionRates::validate() const {
  for (Fuel f : grid::kAllFuels) {
    if (!(std::isfinite((*this)[f]) && (*this)[f] >= 0.0)) {
      throw std::invalid_argument(fmt::format("emission rate for {} must be >= 0", grid::to_string(f)));
    }
  }
  if ((*this)[Fuel::kWind] != 0.0 || (*this)[Fuel::kSolar] != 0.0) {
    throw std::invalid_argument("wind and solar emission rates must be 0");
  }
}

Eigen::VectorXd DispatchResult::served_load() const {
  return gen_by_fuel.colwise().sum().transpose();
}

namespace {

using Handles = std::vector<std::vector<VarId>>;

template <typename Entity>
Handles add_bounded(lp::Model& m, const std::vector<Entity>& entities, const Eigen::MatrixXd& upper,
                    double scale, double Entity::*penalty, const std::string& tag) {
  Handles h(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i) {
    for (Eigen::Index t = 0; t < upper.cols(); ++t) {
      h[i].push_back(m.add_variable(0.0, upper(static_cast<Eigen::Index>(i), t),
                                    scale * entities[i].*penalty,
                                    fmt::format("{}[{},{}]", tag, entities[i].id, t + 1)));
    }
  }
  return h;
}

Eigen::MatrixXd values(const lp::Solution& s, const Handles& h, int hours) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(h.size()), hours);
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (int t = 0; t < hours; ++t) out(static_cast<Eigen::Index>(i), t) = s.value(h[i][t]);
  }
  return out;
}

}  // namespace

DcopfBlock add_dcopf(lp::Model& m, const Grid& g, const DayScenario& day,
                     const std::vector<std::vector<LinearExpr>>& dc_load, double scale,
                     const std::string& prefix, const DispatchOptions& options) {
  day.validate(g);
  const int T = day.hours();
  if (dc_load.size() != g.datacenters.size()) {
    throw grid::ValidationError(fmt::format("expected DC loads for {} datacenters, got {}",
                                            g.datacenters.size(), dc_load.size()));
  }
  for (std::size_t i = 0; i < dc_load.size(); ++i) {
    if (static_cast<int>(dc_load[i].size()) != T) {
      throw grid::ValidationError(fmt::format("datacenter '{}': expected {} hourly loads, got {}",
                                              g.datacenters[i].id, T, dc_load[i].size()));
    }
  }
  if (options.initial_output && options.initial_output->size() != g.generators.size()) {
    throw grid::ValidationError("initial generator output must list every generator");
  }

  DcopfBlock b;
  b.dc_load = dc_load;
  const std::string px = prefix.empty() ? "" : prefix + ".";

  b.p.resize(g.generators.size());
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    const grid::Generator& gen = g.generators[i];
    for (int t = 0; t < T; ++t) {
      b.p[i].push_back(m.add_variable(0.0, gen.capacity, scale * gen.cost,
                                      fmt::format("{}p[{},{}]", px, gen.id, t + 1)));
    }
    // Ramp rows are redundant once the limit covers the full range.
    const bool up = gen.ramp_up < gen.capacity;
    const bool down = gen.ramp_down < gen.capacity;
    for (int t = 1; t < T; ++t) {
      if (up) {
        m.add_constraint({{b.p[i][t], 1.0}, {b.p[i][t - 1], -1.0}}, Relation::kLessEqual,
                         gen.ramp_up, fmt::format("{}rampup[{},{}]", px, gen.id, t + 1));
      }
      if (down) {
        m.add_constraint({{b.p[i][t], 1.0}, {b.p[i][t - 1], -1.0}}, Relation::kGreaterEqual,
                         -gen.ramp_down, fmt::format("{}rampdn[{},{}]", px, gen.id, t + 1));
      }
    }
    if (options.initial_output) {
      const double p0 = (*options.initial_output)[i];
      m.add_constraint({{b.p[i][0], 1.0}}, Relation::kLessEqual, p0 + gen.ramp_up,
                       fmt::format("{}rampup[{},1]", px, gen.id));
      m.add_constraint({{b.p[i][0], 1.0}}, Relation::kGreaterEqual, p0 - gen.ramp_down,
                       fmt::format("{}rampdn[{},1]", px, gen.id));
    }
  }

  b.theta.resize(g.buses.size());
  for (std::size_t n = 0; n < g.buses.size(); ++n) {
    for (int t = 0; t < T; ++t) {
      b.theta[n].push_back(m.add_variable(g.buses[n].theta_min, g.buses[n].theta_max, 0.0,
                                          fmt::format("{}theta[{},{}]", px, g.buses[n].id, t + 1)));
    }
  }
  b.flow.resize(g.lines.size());
  for (std::size_t l = 0; l < g.lines.size(); ++l) {
    const grid::Line& line = g.lines[l];
    for (int t = 0; t < T; ++t) {
      const VarId f = m.add_variable(-line.flow_limit, line.flow_limit, 0.0,
                                     fmt::format("{}f[{},{}]", px, line.id, t + 1));
      b.flow[l].push_back(f);
      m.add_constraint({{f, 1.0},
                        {b.theta[line.from][t], -line.susceptance},
                        {b.theta[line.to][t], line.susceptance}},
                       Relation::kEqual, 0.0, fmt::format("{}pf[{},{}]", px, line.id, t + 1));
    }
  }

  b.shed_load = add_bounded(m, g.loads, day.demand, scale, &grid::Load::shed_penalty, px + "dnd");
  b.curt_import =
      add_bounded(m, g.imports, day.imports, scale, &grid::ImportPoint::curtailment_penalty, px + "m");
  b.curt_wind = add_bounded(m, g.wind, day.wind, scale, &grid::RenewableFarm::curtailment_penalty, px + "w");
  b.curt_solar =
      add_bounded(m, g.solar, day.solar, scale, &grid::RenewableFarm::curtailment_penalty, px + "s");
  b.curt_other =
      add_bounded(m, g.other, day.other, scale, &grid::RenewableFarm::curtailment_penalty, px + "r");

  b.shed_dc.resize(g.datacenters.size());
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    const grid::Datacenter& dc = g.datacenters[i];
    for (int t = 0; t < T; ++t) {
      const LinearExpr& load = dc_load[i][t];
      const std::string name = fmt::format("{}ddc[{},{}]", px, dc.id, t + 1);
      if (load.terms().empty()) {
        if (!(load.constant() >= 0.0)) {
          throw grid::ValidationError(fmt::format("datacenter '{}' hour {}: negative grid load {}",
                                                  dc.id, t + 1, load.constant()));
        }
        b.shed_dc[i].push_back(m.add_variable(0.0, load.constant(), scale * dc.shed_penalty, name));
      } else {
        const VarId v = m.add_variable(0.0, lp::kInf, scale * dc.shed_penalty, name);
        m.add_constraint(LinearExpr(v) - load, Relation::kLessEqual, 0.0, name + ".ub");
        b.shed_dc[i].push_back(v);
      }
    }
  }

  // Nodal balance with demand on the right so the dual is d(cost)/d(demand).
  std::vector<std::vector<LinearExpr>> lhs(g.buses.size(), std::vector<LinearExpr>(T));
  std::vector<std::vector<double>> rhs(g.buses.size(), std::vector<double>(T, 0.0));
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    for (int t = 0; t < T; ++t) lhs[g.generators[i].bus][t].add(b.p[i][t], 1.0);
  }
  for (std::size_t l = 0; l < g.lines.size(); ++l) {
    for (int t = 0; t < T; ++t) {
      lhs[g.lines[l].from][t].add(b.flow[l][t], -1.0);
      lhs[g.lines[l].to][t].add(b.flow[l][t], 1.0);
    }
  }
  auto supply = [&](const auto& entities, const Eigen::MatrixXd& avail, const Handles& curt) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
      for (int t = 0; t < T; ++t) {
        lhs[entities[i].bus][t].add(curt[i][t], -1.0);
        rhs[entities[i].bus][t] -= avail(static_cast<Eigen::Index>(i), t);
      }
    }
  };
  supply(g.imports, day.imports, b.curt_import);
  supply(g.wind, day.wind, b.curt_wind);
  supply(g.solar, day.solar, b.curt_solar);
  supply(g.other, day.other, b.curt_other);
  for (std::size_t i = 0; i < g.loads.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      lhs[g.loads[i].bus][t].add(b.shed_load[i][t], 1.0);
      rhs[g.loads[i].bus][t] += day.demand(static_cast<Eigen::Index>(i), t);
    }
  }
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      lhs[g.datacenters[i].bus][t].add(b.shed_dc[i][t], 1.0);
      lhs[g.datacenters[i].bus][t].add(dc_load[i][t], -1.0);
    }
  }
  b.balance.resize(g.buses.size());
  for (std::size_t n = 0; n < g.buses.size(); ++n) {
    for (int t = 0; t < T; ++t) {
      b.balance[n].push_back(m.add_constraint(lhs[n][t], Relation::kEqual, rhs[n][t],
                                              fmt::format("{}bal[{},{}]", px, g.buses[n].id, t + 1)));
    }
  }
  return b;
}

DispatchResult extract_dispatch(const Grid& g, const DayScenario& day, const DcopfBlock& b,
                                const lp::Solution& s, double scale) {
  const int T = day.hours();
  DispatchResult r;
  r.generation = values(s, b.p, T);
  r.angle = values(s, b.theta, T);
  r.flow = values(s, b.flow, T);
  r.shed_load = values(s, b.shed_load, T);
  r.shed_dc = values(s, b.shed_dc, T);
  r.curt_import = values(s, b.curt_import, T);
  r.curt_wind = values(s, b.curt_wind, T);
  r.curt_solar = values(s, b.curt_solar, T);
  r.curt_other = values(s, b.curt_other, T);

  r.lmp.resize(static_cast<Eigen::Index>(g.buses.size()), T);
  for (std::size_t n = 0; n < g.buses.size(); ++n) {
    for (int t = 0; t < T; ++t) r.lmp(static_cast<Eigen::Index>(n), t) = s.dual_value(b.balance[n][t]) / scale;
  }
  r.dc_load.resize(static_cast<Eigen::Index>(g.datacenters.size()), T);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      const LinearExpr& e = b.dc_load[i][t];
      double v = e.constant();
      for (const lp::Term& term : e.terms()) v += term.coef * s.value(term.var);
      r.dc_load(static_cast<Eigen::Index>(i), t) = v;
    }
  }

  r.gen_by_fuel = Eigen::MatrixXd::Zero(grid::kFuelCount, T);
  auto fuel_row = [&](Fuel f) { return r.gen_by_fuel.row(static_cast<Eigen::Index>(f)); };
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    fuel_row(g.generators[i].fuel) += r.generation.row(static_cast<Eigen::Index>(i));
  }
  fuel_row(Fuel::kWind) = (day.wind - r.curt_wind).colwise().sum();
  fuel_row(Fuel::kSolar) = (day.solar - r.curt_solar).colwise().sum();
  fuel_row(Fuel::kOther) = (day.other - r.curt_other).colwise().sum();
  fuel_row(Fuel::kImport) = (day.imports - r.curt_import).colwise().sum();

  double cost = 0.0;
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    cost += g.generators[i].cost * r.generation.row(static_cast<Eigen::Index>(i)).sum();
  }
  auto penalty = [&](const auto& entities, const Eigen::MatrixXd& x, auto member) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
      cost += entities[i].*member * x.row(static_cast<Eigen::Index>(i)).sum();
    }
  };
  penalty(g.loads, r.shed_load, &grid::Load::shed_penalty);
  penalty(g.datacenters, r.shed_dc, &grid::Datacenter::shed_penalty);
  penalty(g.imports, r.curt_import, &grid::ImportPoint::curtailment_penalty);
  penalty(g.wind, r.curt_wind, &grid::RenewableFarm::curtailment_penalty);
  penalty(g.solar, r.curt_solar, &grid::RenewableFarm::curtailment_penalty);
  penalty(g.other, r.curt_other, &grid::RenewableFarm::curtailment_penalty);
  r.cost = cost;
  return r;
}

namespace {

std::vector<std::vector<LinearExpr>> constant_loads(const Grid& g, const DayScenario& day,
                                                    const Eigen::MatrixXd& dc_load) {
  if (dc_load.rows() != static_cast<Eigen::Index>(g.datacenters.size()) ||
      dc_load.cols() != day.hours()) {
    throw grid::ValidationError(fmt::format("DC load matrix is {}x{}, expected {}x{}",
                                            dc_load.rows(), dc_load.cols(), g.datacenters.size(),
                                            day.hours()));
  }
  std::vector<std::vector<LinearExpr>> out(g.datacenters.size());
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    for (int t = 0; t < day.hours(); ++t) {
      out[i].emplace_back(dc_load(static_cast<Eigen::Index>(i), t));
    }
  }
  return out;
}

}  // namespace

lp::Model formulate_dcopf(const Grid& g, const DayScenario& day, const Eigen::MatrixXd& dc_load,
                          const DispatchOptions& options) {
  lp::Model m;
  add_dcopf(m, g, day, constant_loads(g, day, dc_load), 1.0, {}, options);
  return m;
}

DispatchResult solve_dispatch(const Grid& g, const DayScenario& day, const Eigen::MatrixXd& dc_load,
                              const DispatchOptions& options) {
  lp::Model m;
  const DcopfBlock b = add_dcopf(m, g, day, constant_loads(g, day, dc_load), 1.0, {}, options);
  const lp::Solution s = lp::solve(m, options.solver);
  if (!s.optimal()) {
    throw lp::SolverError(fmt::format("dispatch for '{}' ended {} ({} rows, {} columns)", day.id,
                                      lp::to_string(s.status), m.num_constraints(),
                                      m.num_variables()));
  }
  return extract_dispatch(g, day, b, s);
}

Eigen::MatrixXd average_dc_load(const Grid& g, int hours) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(g.datacenters.size()), hours);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)).setConstant(g.datacenters[i].power_avg());
  }
  return out;
}

double grid_carbon(const DispatchResult& r, const EmissionRates& rates) {
  double kg = 0.0;
  for (Fuel f : grid::kAllFuels) kg += rates[f] * std::max(0.0, r.fuel_total(f));
  return kg;
}

Eigen::VectorXd average_carbon_intensity(const DispatchResult& r, const EmissionRates& rates) {
  const int T = r.hours();
  Eigen::VectorXd aci = Eigen::VectorXd::Zero(T);
  const Eigen::VectorXd served = r.served_load();
  for (int t = 0; t < T; ++t) {
    if (served(t) <= 1e-9) continue;
    double kg = 0.0;
    for (Fuel f : grid::kAllFuels) {
      kg += rates[f] * std::max(0.0, r.gen_by_fuel(static_cast<Eigen::Index>(f), t));
    }
    aci(t) = kg / served(t);
  }
  return aci;
}

std::string dispatch_to_csv(const Grid& g, const DispatchResult& r) {
  std::string out = "entity,hour,quantity,value\n";
  auto dump = [&](const auto& entities, const Eigen::MatrixXd& x, const char* quantity) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
      for (Eigen::Index t = 0; t < x.cols(); ++t) {
        out += fmt::format("{},{},{},{}\n", entities[i].id, t + 1, quantity,
                           x(static_cast<Eigen::Index>(i), t));
      }
    }
  };
  dump(g.generators, r.generation, "generation_mw");
  dump(g.lines, r.flow, "flow_mw");
  dump(g.buses, r.angle, "angle_rad");
  dump(g.buses, r.lmp, "lmp_usd_per_mwh");
  dump(g.loads, r.shed_load, "shed_mw");
  dump(g.datacenters, r.dc_load, "dc_load_mw");
  dump(g.datacenters, r.shed_dc, "shed_mw");
  dump(g.imports, r.curt_import, "curtailed_mw");
  dump(g.wind, r.curt_wind, "curtailed_mw");
  dump(g.solar, r.curt_solar, "curtailed_mw");
  dump(g.other, r.curt_other, "curtailed_mw");
  return out;
}

std::string dispatch_summary_json(const DispatchResult& r, const EmissionRates& rates) {
  nlohmann::ordered_json j;
  j["dispatch_cost_usd"] = r.cost;
  j["emissions_kg"] = grid_carbon(r, rates);
  j["served_mwh"] = r.served_load().sum();
  for (Fuel f : grid::kAllFuels) {
    j["generation_mwh"][std::string(grid::to_string(f))] = r.fuel_total(f);
  }
  j["shed_mwh"] = {{"load", r.shed_load.sum()}, {"datacenter", r.shed_dc.sum()}};
  j["curtailed_mwh"] = {{"import", r.curt_import.sum()},
                        {"wind", r.curt_wind.sum()},
                        {"solar", r.curt_solar.sum()},
                        {"other", r.curt_other.sum()}};
  return j.dump(2) + "\n";
}

}  // namespace dcflex::dispatch
