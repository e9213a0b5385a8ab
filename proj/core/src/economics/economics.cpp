#include "dcflex/economics/economics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "dcflex/util/parallel.hpp"

namespace dcflex::economics {

namespace pt = boost::property_tree;
using grid::Fuel;
using grid::ValidationError;

void BatteryCosts::validate() const {
  if (!(dod > 0.0 && dod <= 1.0)) throw std::invalid_argument("battery DoD must be in (0, 1]");
  if (!(rte > 0.0 && rte <= 1.0)) throw std::invalid_argument("battery RTE must be in (0, 1]");
  if (!(capex_power >= 0.0) || !(capex_energy >= 0.0)) {
    throw std::invalid_argument("battery capex must be >= 0");
  }
  if (!(depreciation_years > 0.0)) throw std::invalid_argument("battery depreciation period must be > 0");
}

void EconomicsConfig::validate() const {
  if (!(carbon_price >= 0.0)) throw std::invalid_argument("carbon price must be >= 0");
  if (!(lcoe_wind >= 0.0) || !(lcoe_solar >= 0.0)) throw std::invalid_argument("LCOE must be >= 0");
  if (!(days_per_year > 0.0)) throw std::invalid_argument("days_per_year must be > 0");
  rates.validate();
  battery.validate();
}

namespace {

struct Key {
  const char* section;
  const char* name;
  double EconomicsConfig::*field = nullptr;
  double BatteryCosts::*battery = nullptr;
};

constexpr Key kKeys[] = {
    {"carbon", "price_usd_per_t", &EconomicsConfig::carbon_price},
    {"lcoe", "wind_usd_per_mwh", &EconomicsConfig::lcoe_wind},
    {"lcoe", "solar_usd_per_mwh", &EconomicsConfig::lcoe_solar},
    {"annual", "days_per_year", &EconomicsConfig::days_per_year},
    {"battery", "dod", nullptr, &BatteryCosts::dod},
    {"battery", "rte", nullptr, &BatteryCosts::rte},
    {"battery", "capex_power_usd_per_mw", nullptr, &BatteryCosts::capex_power},
    {"battery", "capex_energy_usd_per_mwh", nullptr, &BatteryCosts::capex_energy},
    {"battery", "depreciation_years", nullptr, &BatteryCosts::depreciation_years},
};

double& slot(EconomicsConfig& c, const Key& k) { return k.field ? c.*k.field : c.battery.*k.battery; }
double slot(const EconomicsConfig& c, const Key& k) { return k.field ? c.*k.field : c.battery.*k.battery; }

double to_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: '{}' is not a finite number", where, text));
  }
  return v;
}

}  // namespace

EconomicsConfig parse_config(const std::string& ini_text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("{} line {}: {}", origin, e.line(), e.message()));
  }
  EconomicsConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ValidationError(fmt::format("{}: key '{}' outside a section", origin, section));
    }
    for (const auto& [name, value] : body) {
      const std::string where = fmt::format("{} [{}] {}", origin, section, name);
      const double v = to_number(value.data(), where);
      bool known = false;
      if (section == "emissions") {
        try {
          cfg.rates[grid::parse_fuel(name)] = v;
          known = true;
        } catch (const std::invalid_argument&) {
        }
      }
      for (const Key& k : kKeys) {
        if (section == k.section && name == k.name) {
          slot(cfg, k) = v;
          known = true;
        }
      }
      if (!known) throw ValidationError(fmt::format("{}: unknown setting", where));
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(fmt::format("{}: {}", origin, e.what()));
  }
  return cfg;
}

EconomicsConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string config_to_ini(const EconomicsConfig& cfg) {
  std::string out;
  std::string current;
  for (const Key& k : kKeys) {
    if (current != k.section) {
      out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", k.section);
      current = k.section;
    }
    out += fmt::format("{} = {}\n", k.name, slot(cfg, k));
  }
  out += "\n[emissions]\n";
  for (Fuel f : grid::kAllFuels) out += fmt::format("{} = {}\n", grid::to_string(f), cfg.rates[f]);
  return out;
}

double dc_power_cost(const Eigen::VectorXd& load, const Eigen::VectorXd& lmp) {
  if (load.size() != lmp.size()) {
    throw std::invalid_argument(
        fmt::format("load has {} hours but prices have {}", load.size(), lmp.size()));
  }
  return lmp.dot(load);
}

namespace {

void check_pair(const DayOutcome& fixed, const DayOutcome& flex) {
  if (fixed.scenario_id != flex.scenario_id) {
    throw std::invalid_argument(fmt::format("outcomes are for different scenarios: '{}' vs '{}'",
                                            fixed.scenario_id, flex.scenario_id));
  }
  if (fixed.loads.rows() != flex.loads.rows() || fixed.loads.cols() != flex.loads.cols() ||
      flex.profiles.size() != static_cast<std::size_t>(flex.loads.rows())) {
    throw std::invalid_argument(
        fmt::format("outcomes for scenario '{}' do not share one grid", fixed.scenario_id));
  }
}

}  // namespace

GmAllocation allocate_carbon_gm(const DayOutcome& fixed, const DayOutcome& flex) {
  check_pair(fixed, flex);
  GmAllocation a;
  a.fixed = fixed.loads * fixed.aci;
  a.flexible = flex.loads * flex.aci;
  a.reduction = a.fixed - a.flexible;
  return a;
}

ActAllocation allocate_carbon_act(const DayOutcome& fixed, const DayOutcome& flex) {
  check_pair(fixed, flex);
  const auto n = flex.loads.rows();
  ActAllocation a;
  a.delta = fixed.grid_carbon - flex.grid_carbon;
  a.reduction = Eigen::VectorXd::Zero(n);
  if (a.delta == 0.0 || n == 0) return a;
  Eigen::VectorXd moved(n);
  for (Eigen::Index i = 0; i < n; ++i) moved(i) = flex.profiles[static_cast<std::size_t>(i)].energy_moved();
  const double total = moved.sum();
  if (!(total > 0.0)) {
    moved.setOnes();
    a.equal_split = true;
  }
  a.reduction = a.delta * moved / moved.sum();
  // Last DC absorbs the rounding so the shares sum to delta.
  a.reduction(n - 1) = a.delta - a.reduction.head(n - 1).sum();
  return a;
}

CarbonLedger carbon_ledger(const DayOutcome& fixed, const DayOutcome& flex) {
  CarbonLedger l;
  l.scenario_id = fixed.scenario_id;
  l.gm = allocate_carbon_gm(fixed, flex);
  l.act = allocate_carbon_act(fixed, flex);
  l.grid_fixed = fixed.grid_carbon;
  l.grid_flexible = flex.grid_carbon;
  return l;
}

void BatterySpec::validate() const {
  if (!(power_max > 0.0) || !std::isfinite(power_max)) throw std::invalid_argument("battery power must be > 0");
  if (!(energy_cap > 0.0) || !std::isfinite(energy_cap)) {
    throw std::invalid_argument("battery energy capacity must be > 0");
  }
  costs.validate();
}

std::optional<BatterySpec> size_battery(double deficit_energy, double deficit_power, const BatteryCosts& costs) {
  costs.validate();
  if (!(deficit_energy >= 0.0) || !(deficit_power >= 0.0)) {
    throw std::invalid_argument("battery sizing needs non-negative deficits");
  }
  if (deficit_energy <= 0.0 || deficit_power <= 0.0) return std::nullopt;
  BatterySpec b;
  b.energy_cap = deficit_energy / costs.dod;
  b.power_max = deficit_power;
  b.costs = costs;
  return b;
}

double bes_tco(const BatterySpec& spec, double cycle_avg, double loss_cost) {
  spec.validate();
  if (!(cycle_avg >= 0.0)) throw std::invalid_argument("cycle_avg must be >= 0");
  if (!(loss_cost >= 0.0)) throw std::invalid_argument("lossCost must be >= 0");
  const BatteryCosts& c = spec.costs;
  const double capex = spec.power_max * c.capex_power + spec.energy_cap * c.capex_energy;
  const double unit_sys = c.capex_power + c.capex_energy * spec.duration();
  return capex / c.depreciation_years + spec.power_max * unit_sys * (0.01 * cycle_avg + 0.015) + loss_cost;
}

double cycle_count(const std::vector<double>& daily_discharge, const BatterySpec& spec,
                   const std::vector<double>& weights) {
  if (!(spec.energy_cap > 0.0)) throw std::invalid_argument("cycle count needs energyCap > 0");
  if (daily_discharge.empty()) return 0.0;
  if (!weights.empty() && weights.size() != daily_discharge.size()) {
    throw std::invalid_argument("cycle count weights do not match the discharge series");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t d = 0; d < daily_discharge.size(); ++d) {
    if (!(daily_discharge[d] >= 0.0)) throw std::invalid_argument("daily discharge must be >= 0");
    const double w = weights.empty() ? 1.0 : weights[d];
    num += w * daily_discharge[d];
    den += w;
  }
  if (!(den > 0.0)) throw std::invalid_argument("cycle count weights must have a positive sum");
  return num / den / (spec.energy_cap * spec.costs.dod);
}

double loss_cost(const BatterySpec& spec, double mean_daily_discharge, double mean_lmp, double days_per_year) {
  if (!(mean_daily_discharge >= 0.0)) throw std::invalid_argument("daily discharge must be >= 0");
  // Negative average prices would turn losses into income; floor at zero.
  return (1.0 / spec.costs.rte - 1.0) * mean_daily_discharge * days_per_year * std::max(0.0, mean_lmp);
}

double benefit_cost_ratio(double power_savings, double carbon_reduction_t, double carbon_price, double tco) {
  if (!(tco > 0.0)) throw std::domain_error("benefit-cost ratio is undefined for a zero decoupling cost");
  return (power_savings + carbon_reduction_t * carbon_price) / tco;
}

std::vector<DcBenefit> benefit_cost(const Grid& g, const std::vector<DayScenario>& days,
                                    const std::vector<DayOutcome>& fixed, const std::vector<DayOutcome>& flex,
                                    const decoupling::DecouplingAllocation& alloc, const EconomicsConfig& cfg,
                                    CarbonBasis basis) {
  cfg.validate();
  alloc.validate(g);
  if (days.empty()) throw std::invalid_argument("benefit-cost needs at least one evaluation day");
  if (fixed.size() != days.size() || flex.size() != days.size()) {
    throw std::invalid_argument("benefit-cost needs one fixed and one flexible outcome per day");
  }
  std::vector<double> weights;
  for (const DayScenario& d : days) weights.push_back(d.weight);
  const auto annual = [&](const std::vector<double>& daily) {
    return grid::weighted_mean(days, daily) * cfg.days_per_year;
  };

  std::vector<CarbonLedger> ledgers;
  for (std::size_t d = 0; d < days.size(); ++d) {
    if (fixed[d].scenario_id != days[d].id) {
      throw std::invalid_argument(
          fmt::format("outcome '{}' does not match day '{}'", fixed[d].scenario_id, days[d].id));
    }
    ledgers.push_back(carbon_ledger(fixed[d], flex[d]));
  }

  std::vector<DcBenefit> out;
  for (std::size_t i = 0; i < g.datacenters.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const grid::Datacenter& dc = g.datacenters[i];
    std::vector<double> savings, carbon, discharge, price;
    double max_energy = 0.0, max_power = 0.0;
    for (std::size_t d = 0; d < days.size(); ++d) {
      savings.push_back(fixed[d].dc_power_cost(k) - flex[d].dc_power_cost(k));
      carbon.push_back(basis == CarbonBasis::kGm ? ledgers[d].gm.reduction(k) : ledgers[d].act.reduction(k));
      const decoupling::DecouplingProfile& p = flex[d].profiles[i];
      discharge.push_back(p.energy_deficit);
      max_energy = std::max(max_energy, p.energy_deficit);
      max_power = std::max(max_power, p.power_deficit.size() ? p.power_deficit.maxCoeff() : 0.0);
      price.push_back(flex[d].actual.lmp.row(dc.bus).mean());
    }
    DcBenefit b;
    b.dc_id = dc.id;
    b.power_savings = annual(savings);
    b.carbon_reduction = annual(carbon) / 1000.0;
    b.carbon_value = b.carbon_reduction * cfg.carbon_price;
    const double cap_e = std::isfinite(alloc.energy_cap(k)) ? alloc.energy_cap(k) : max_energy;
    const double cap_p = std::isfinite(alloc.power_cap(k)) ? alloc.power_cap(k) : max_power;
    b.battery = size_battery(cap_e, cap_p, cfg.battery);
    if (b.battery) {
      b.cycles_per_day = cycle_count(discharge, *b.battery, weights);
      b.loss_cost = loss_cost(*b.battery, grid::weighted_mean(days, discharge), grid::weighted_mean(days, price),
                              cfg.days_per_year);
      b.tco = bes_tco(*b.battery, b.cycles_per_day, b.loss_cost);
      b.ratio = benefit_cost_ratio(b.power_savings, b.carbon_reduction, cfg.carbon_price, b.tco);
    }
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

double weighted_carbon(const Grid& g, const std::vector<DayScenario>& days, double scale, const EconomicsConfig& cfg,
                       const RenewableOptions& options) {
  std::vector<double> carbon(days.size());
  detail::parallel_for(days.size(), options.jobs, [&](std::size_t d) {
    DayScenario day = days[d];
    day.wind *= scale;
    day.solar *= scale;
    const auto r = dispatch::solve_dispatch(g, day, dispatch::average_dc_load(g, day.hours()), options.dispatch);
    carbon[d] = dispatch::grid_carbon(r, cfg.rates);
  });
  return grid::weighted_mean(days, carbon);
}

}  // namespace

RenewableEquivalent renewable_equivalent_cost(const Grid& g, const std::vector<DayScenario>& days,
                                              double target_reduction, const EconomicsConfig& cfg,
                                              const RenewableOptions& options) {
  cfg.validate();
  if (days.empty()) throw std::invalid_argument("renewable comparison needs at least one day");
  if (!(target_reduction >= 0.0) || !std::isfinite(target_reduction)) {
    throw std::invalid_argument("target carbon reduction must be finite and >= 0");
  }
  if (!(options.max_scale > 1.0)) throw std::invalid_argument("max renewable scale must exceed 1");

  RenewableEquivalent out;
  if (target_reduction == 0.0) {
    out.achievable = true;
    return out;
  }
  const double base = weighted_carbon(g, days, 1.0, cfg, options);
  const auto reduction = [&](double s) { return base - weighted_carbon(g, days, s, cfg, options); };

  double lo = 1.0, hi = options.max_scale;
  double r_hi = reduction(hi);
  if (r_hi < target_reduction) {
    out.scale = hi;
    out.reduction = r_hi;
    out.annual_cost = std::numeric_limits<double>::infinity();
    return out;
  }
  // Smallest scale whose reduction reaches the target, assuming carbon falls
  // as renewable supply grows.
  int it = 0;
  for (; it < options.max_iterations && hi - lo > options.tolerance * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = reduction(mid);
    if (r >= target_reduction) {
      hi = mid;
      r_hi = r;
    } else {
      lo = mid;
    }
  }
  if (hi - lo > options.tolerance * hi) {
    throw lp::SolverError(fmt::format("renewable scaling bisection did not converge after {} steps: bracket "
                                      "[{}, {}], reduction at upper end {} kg/day, target {}",
                                      it, lo, hi, r_hi, target_reduction));
  }
  std::vector<double> wind, solar;
  for (const DayScenario& d : days) {
    wind.push_back(d.wind.sum());
    solar.push_back(d.solar.sum());
  }
  out.achievable = true;
  out.scale = hi;
  out.reduction = r_hi;
  out.added_wind = (hi - 1.0) * grid::weighted_mean(days, wind);
  out.added_solar = (hi - 1.0) * grid::weighted_mean(days, solar);
  out.annual_cost = (out.added_wind * cfg.lcoe_wind + out.added_solar * cfg.lcoe_solar) * cfg.days_per_year;
  return out;
}

}  // namespace dcflex::economics
