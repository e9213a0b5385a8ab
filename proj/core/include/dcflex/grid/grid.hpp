#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcflex::grid {

// Fuel / resource categories used for dispatch accounting and emissions.
enum class Fuel : std::uint8_t { kNuclear, kCoal, kGas, kWind, kSolar, kOther, kImport };
inline constexpr std::size_t kFuelCount = 7;
inline constexpr std::array<Fuel, kFuelCount> kAllFuels = {
    Fuel::kNuclear, Fuel::kCoal, Fuel::kGas,   Fuel::kWind,
    Fuel::kSolar,   Fuel::kOther, Fuel::kImport};

std::string_view to_string(Fuel f);
// Throws std::invalid_argument on an unknown tag.
Fuel parse_fuel(std::string_view tag);

// Default generation cost $/MWh by thermal fuel (nuclear 6, coal 31, gas 22).
double default_generation_cost(Fuel f);

// Curtailment / shedding penalties in $/MWh.
struct Penalties {
  static constexpr double kNonDcShedding = 1000.0;
  static constexpr double kDcShedding = 1000.0;
  static constexpr double kWindCurtailment = 100.0;
  static constexpr double kSolarCurtailment = 100.0;
  static constexpr double kImportCurtailment = 500.0;
  static constexpr double kOtherCurtailment = 1000.0;
};

inline constexpr double kPi = 3.14159265358979323846;

struct Bus {
  std::string id;
  double theta_min = -kPi;
  double theta_max = kPi;

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Line {
  std::string id;
  int from = 0;  // bus index
  int to = 0;
  double susceptance = 1.0;  // MW per rad
  double flow_limit = 0.0;   // MW

  friend bool operator==(const Line&, const Line&) = default;
};

struct Generator {
  std::string id;
  int bus = 0;
  Fuel fuel = Fuel::kGas;
  double cost = 22.0;      // $/MWh
  double capacity = 0.0;   // MW
  double ramp_up = 0.0;    // MW/h
  double ramp_down = 0.0;  // MW/h

  friend bool operator==(const Generator&, const Generator&) = default;
};

struct ImportPoint {
  std::string id;
  int bus = 0;
  double curtailment_penalty = Penalties::kImportCurtailment;

  friend bool operator==(const ImportPoint&, const ImportPoint&) = default;
};

// Wind, solar, or other renewable farm; availability comes from the scenario.
struct RenewableFarm {
  std::string id;
  int bus = 0;
  double curtailment_penalty = 0.0;

  friend bool operator==(const RenewableFarm&, const RenewableFarm&) = default;
};

struct Load {
  std::string id;
  int bus = 0;
  double shed_penalty = Penalties::kNonDcShedding;

  friend bool operator==(const Load&, const Load&) = default;
};

struct Datacenter {
  std::string id;
  int bus = 0;
  double power_max = 0.0;  // MW
  double util_min = 0.0;
  double util_avg = 0.0;
  double util_max = 1.0;
  double shed_penalty = Penalties::kDcShedding;

  double power_avg() const { return power_max * util_avg; }
  double load_min() const { return power_max * util_min; }
  double load_max() const { return power_max * util_max; }

  friend bool operator==(const Datacenter&, const Datacenter&) = default;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Grid {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<ImportPoint> imports;
  std::vector<RenewableFarm> wind;
  std::vector<RenewableFarm> solar;
  std::vector<RenewableFarm> other;
  std::vector<Load> loads;
  std::vector<Datacenter> datacenters;

  // Index of the bus with `id`, or -1.
  int bus_index(std::string_view id) const;

  // Throws ValidationError naming the first offending record: dangling bus
  // references, non-positive flow limits, negative capacities or ramps,
  // utilization ordering, duplicate ids, disconnected line graph.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace dcflex::grid
