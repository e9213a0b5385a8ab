#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dcflex/grid/grid.hpp"

namespace dcflex::grid {

enum class Season : std::uint8_t { kWinter, kSpring, kSummer, kFall };

std::string_view to_string(Season s);
Season parse_season(std::string_view tag);

struct DayType {
  Season season = Season::kWinter;
  bool weekend = false;

  friend bool operator==(const DayType&, const DayType&) = default;
};

// One simulated day: hourly availability/demand profiles (entity x hour, MW)
// for every profiled entity of a Grid, plus an aggregation weight.
struct DayScenario {
  std::string id;
  DayType day_type;
  double weight = 1.0;
  Eigen::MatrixXd demand;   // non-DC loads
  Eigen::MatrixXd imports;  // import availability
  Eigen::MatrixXd wind;
  Eigen::MatrixXd solar;
  Eigen::MatrixXd other;

  int hours() const { return static_cast<int>(demand.cols()); }

  // Throws ValidationError on a shape mismatch with `grid` (naming the entity
  // kind), a missing (NaN) or negative entry (naming entity and hour), or a
  // non-positive weight.
  void validate(const Grid& grid) const;

  friend bool operator==(const DayScenario&, const DayScenario&) = default;
};

enum class Split : std::uint8_t { kTrain, kEval };

struct ScenarioSet {
  std::vector<DayScenario> days;
  std::vector<Split> split;  // parallel to days

  std::vector<DayScenario> train() const;
  std::vector<DayScenario> eval() const;

  // Deterministic shuffle-and-cut partition: round(train_frac * n) training
  // days, at least one of each side when n >= 2.
  void assign_split(double train_frac, std::uint64_t seed);

  void validate(const Grid& grid) const;
};

// Sum over days of weight * value / sum of weights.
double weighted_mean(const std::vector<DayScenario>& days, const std::vector<double>& values);

// Weekday/weekend 5:2 weights normalized by the count of each day kind in
// `days`: weekday days get 5/n_weekday, weekend days 2/n_weekend.
void assign_week_weights(std::vector<DayScenario>& days);

}  // namespace dcflex::grid
