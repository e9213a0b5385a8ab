#include "dcflex/grid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace dcflex::grid {

std::string_view to_string(Season s) {
  switch (s) {
    case Season::kWinter: return "winter";
    case Season::kSpring: return "spring";
    case Season::kSummer: return "summer";
    case Season::kFall: return "fall";
  }
  return "unknown";
}

Season parse_season(std::string_view tag) {
  for (Season s : {Season::kWinter, Season::kSpring, Season::kSummer, Season::kFall}) {
    if (to_string(s) == tag) return s;
  }
  throw ValidationError(fmt::format("unknown season '{}'", tag));
}

namespace {

template <typename Entity>
void check_profile(const std::string& scenario, std::string_view kind,
                   const std::vector<Entity>& entities, const Eigen::MatrixXd& m, int hours) {
  if (m.rows() != static_cast<Eigen::Index>(entities.size()) || m.cols() != hours) {
    throw ValidationError(fmt::format(
        "scenario '{}': {} profile is {}x{}, expected {}x{}", scenario, kind, m.rows(),
        m.cols(), entities.size(), hours));
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index t = 0; t < m.cols(); ++t) {
      const double v = m(i, t);
      if (std::isnan(v)) {
        throw ValidationError(fmt::format("scenario '{}': missing {} profile entry for '{}' hour {}",
                                          scenario, kind, entities[i].id, t + 1));
      }
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(fmt::format("scenario '{}': {} profile for '{}' hour {} is {} (< 0)",
                                          scenario, kind, entities[i].id, t + 1, v));
      }
    }
  }
}

}  // namespace

void DayScenario::validate(const Grid& grid) const {
  const int t = hours();
  if (t <= 0) throw ValidationError(fmt::format("scenario '{}': empty horizon", id));
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw ValidationError(fmt::format("scenario '{}': weight must be > 0", id));
  }
  check_profile(id, "demand", grid.loads, demand, t);
  check_profile(id, "import", grid.imports, imports, t);
  check_profile(id, "wind", grid.wind, wind, t);
  check_profile(id, "solar", grid.solar, solar, t);
  check_profile(id, "other", grid.other, other, t);
}

std::vector<DayScenario> ScenarioSet::train() const {
  std::vector<DayScenario> out;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (split.at(i) == Split::kTrain) out.push_back(days[i]);
  }
  return out;
}

std::vector<DayScenario> ScenarioSet::eval() const {
  std::vector<DayScenario> out;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (split.at(i) == Split::kEval) out.push_back(days[i]);
  }
  return out;
}

void ScenarioSet::assign_split(double train_frac, std::uint64_t seed) {
  if (!(train_frac >= 0.0 && train_frac <= 1.0)) {
    throw std::invalid_argument("train fraction must be in [0, 1]");
  }
  const std::size_t n = days.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  auto n_train = static_cast<std::size_t>(std::lround(train_frac * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  split.assign(n, Split::kEval);
  for (std::size_t k = 0; k < n_train; ++k) split[order[k]] = Split::kTrain;
}

void ScenarioSet::validate(const Grid& grid) const {
  if (split.size() != days.size()) {
    throw ValidationError("scenario split labels do not cover the scenario set");
  }
  std::vector<std::string> ids;
  for (const DayScenario& d : days) {
    d.validate(grid);
    ids.push_back(d.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("duplicate scenario id");
  }
  if (!days.empty()) {
    const int t = days.front().hours();
    for (const DayScenario& d : days) {
      if (d.hours() != t) throw ValidationError("scenarios have different horizons");
    }
  }
}

double weighted_mean(const std::vector<DayScenario>& days, const std::vector<double>& values) {
  if (days.size() != values.size() || days.empty()) {
    throw std::invalid_argument("weighted_mean: size mismatch or empty set");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < days.size(); ++i) {
    num += days[i].weight * values[i];
    den += days[i].weight;
  }
  return num / den;
}

void assign_week_weights(std::vector<DayScenario>& days) {
  const auto weekend = static_cast<double>(
      std::count_if(days.begin(), days.end(), [](const DayScenario& d) { return d.day_type.weekend; }));
  const double weekday = static_cast<double>(days.size()) - weekend;
  for (DayScenario& d : days) d.weight = d.day_type.weekend ? 2.0 / weekend : 5.0 / weekday;
}

}  // namespace dcflex::grid
