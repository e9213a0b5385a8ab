#include "dcflex/decoupling/profile.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "dcflex/util/csv.hpp"

namespace dcflex::decoupling {

using lp::LinearExpr;
using lp::Relation;

DecouplingProfile decoupling_profile(const Eigen::VectorXd& load, const Datacenter& dc) {
  const double avg = dc.power_avg();
  const auto T = load.size();
  DecouplingProfile p;
  p.power_surplus.resize(T);
  p.power_deficit.resize(T);
  p.net_energy.resize(T);
  double net = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (!(std::isfinite(load(t)) && load(t) >= 0.0)) {
      throw std::invalid_argument(
          fmt::format("datacenter '{}' hour {}: grid load {} is negative", dc.id, t + 1, load(t)));
    }
    const double diff = load(t) - avg;
    p.power_surplus(t) = std::max(0.0, diff);
    p.power_deficit(t) = std::max(0.0, -diff);
    p.energy_surplus += p.power_surplus(t);
    p.energy_deficit += p.power_deficit(t);
    net += p.power_surplus(t) - p.power_deficit(t);
    p.net_energy(t) = net;
  }
  return p;
}

double max_power_deficit(const Datacenter& dc) { return dc.power_max * (dc.util_avg - dc.util_min); }

double range_violation(const Eigen::VectorXd& load, const Datacenter& dc) {
  double worst = 0.0;
  for (Eigen::Index t = 0; t < load.size(); ++t) {
    worst = std::max({worst, dc.load_min() - load(t), load(t) - dc.load_max()});
  }
  return worst;
}

double net_energy_violation(const Eigen::VectorXd& load, const Datacenter& dc) {
  double worst = 0.0;
  double net = 0.0;
  for (Eigen::Index t = 0; t < load.size(); ++t) {
    net += load(t) - dc.power_avg();
    worst = std::max(worst, net);
  }
  return std::max(worst, std::abs(net));
}

void DecouplingAllocation::validate(const Grid& g) const {
  if (dc_ids.size() != g.datacenters.size() || energy_cap.size() != static_cast<Eigen::Index>(size()) ||
      power_cap.size() != static_cast<Eigen::Index>(size())) {
    throw std::invalid_argument(fmt::format("allocation lists {} datacenters, grid has {}",
                                            dc_ids.size(), g.datacenters.size()));
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (dc_ids[i] != g.datacenters[i].id) {
      throw std::invalid_argument(fmt::format("allocation entry {} is '{}', grid expects '{}'", i + 1,
                                              dc_ids[i], g.datacenters[i].id));
    }
    if (!(energy_cap(static_cast<Eigen::Index>(i)) >= 0.0) || !(power_cap(static_cast<Eigen::Index>(i)) >= 0.0)) {
      throw std::invalid_argument(fmt::format("allocation for '{}' has a negative cap", dc_ids[i]));
    }
  }
  if (std::isfinite(total) && energy_cap.sum() > total + 1e-6) {
    throw std::invalid_argument(
        fmt::format("allocated energy {} MWh exceeds the budget {} MWh", energy_cap.sum(), total));
  }
}

DecouplingAllocation unlimited_allocation(const Grid& g) {
  DecouplingAllocation a;
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  a.energy_cap = Eigen::VectorXd::Constant(n, lp::kInf);
  a.power_cap.resize(n);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    a.dc_ids.push_back(g.datacenters[i].id);
    a.power_cap(static_cast<Eigen::Index>(i)) = max_power_deficit(g.datacenters[i]);
  }
  a.total = lp::kInf;
  return a;
}

std::string allocation_to_csv(const DecouplingAllocation& a) {
  std::string out = "dc_id,energy_cap_mwh,power_cap_mw\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    out += fmt::format("{},{},{}\n", a.dc_ids[i], a.energy_cap(static_cast<Eigen::Index>(i)),
                       a.power_cap(static_cast<Eigen::Index>(i)));
  }
  return out;
}

void save_allocation(const DecouplingAllocation& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << allocation_to_csv(a);
}

DecouplingAllocation load_allocation(const Grid& g, const std::filesystem::path& path) {
  const csv::CsvTable t = csv::read_csv(path);
  t.require_header({"dc_id", "energy_cap_mwh", "power_cap_mw"});
  std::map<std::string, std::pair<double, double>> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    rows[row[0]] = {csv::parse_number(row[1], path, r + 2), csv::parse_number(row[2], path, r + 2)};
  }
  DecouplingAllocation a;
  const auto n = static_cast<Eigen::Index>(g.datacenters.size());
  a.energy_cap.resize(n);
  a.power_cap.resize(n);
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    auto it = rows.find(g.datacenters[i].id);
    if (it == rows.end()) {
      throw grid::ValidationError(
          fmt::format("{}: no allocation for datacenter '{}'", path.string(), g.datacenters[i].id));
    }
    a.dc_ids.push_back(it->first);
    a.energy_cap(static_cast<Eigen::Index>(i)) = it->second.first;
    a.power_cap(static_cast<Eigen::Index>(i)) = it->second.second;
  }
  if (rows.size() != g.datacenters.size()) {
    throw grid::ValidationError(fmt::format("{}: allocation lists unknown datacenters", path.string()));
  }
  a.total = a.energy_cap.sum();
  a.validate(g);
  return a;
}

std::vector<LinearExpr> FlexibleLoad::load_expr() const {
  return {load.begin(), load.end()};
}

FlexibleLoad add_flexible_load(lp::Model& m, const Datacenter& dc, int hours, const LinearExpr& cap,
                               const std::string& prefix, const FlexibleLoadOptions& options) {
  FlexibleLoad f;
  const double avg = dc.power_avg();
  for (int t = 0; t < hours; ++t) {
    f.load.push_back(m.add_variable(dc.load_min(), dc.load_max(), 0.0,
                                    fmt::format("{}load[{},{}]", prefix, dc.id, t + 1)));
  }
  // Running net energy never positive, zero at the end of the day.
  std::vector<lp::Term> prefix_terms;
  for (int t = 0; t < hours; ++t) {
    prefix_terms.push_back({f.load[t], 1.0});
    const bool last = t + 1 == hours;
    m.add_constraint(prefix_terms, last ? Relation::kEqual : Relation::kLessEqual, avg * (t + 1),
                     fmt::format("{}net[{},{}]", prefix, dc.id, t + 1));
  }
  const bool uncapped = cap.terms().empty() && !std::isfinite(cap.constant());
  if (uncapped && options.deficit_penalty == 0.0) return f;
  LinearExpr total;
  for (int t = 0; t < hours; ++t) {
    const lp::VarId d = m.add_variable(0.0, avg - dc.load_min(), options.deficit_penalty,
                                       fmt::format("{}def[{},{}]", prefix, dc.id, t + 1));
    f.deficit.push_back(d);
    m.add_constraint({{d, 1.0}, {f.load[t], 1.0}}, Relation::kGreaterEqual, avg,
                     fmt::format("{}defpos[{},{}]", prefix, dc.id, t + 1));
    total.add(d, 1.0);
  }
  if (uncapped) return f;
  m.add_constraint(total - cap, Relation::kLessEqual, 0.0, fmt::format("{}cap[{}]", prefix, dc.id));
  return f;
}

}  // namespace dcflex::decoupling
