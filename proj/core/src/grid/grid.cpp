#include "dcflex/grid/grid.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace dcflex::grid {

std::string_view to_string(Fuel f) {
  switch (f) {
    case Fuel::kNuclear: return "nuclear";
    case Fuel::kCoal: return "coal";
    case Fuel::kGas: return "gas";
    case Fuel::kWind: return "wind";
    case Fuel::kSolar: return "solar";
    case Fuel::kOther: return "other";
    case Fuel::kImport: return "import";
  }
  return "unknown";
}

Fuel parse_fuel(std::string_view tag) {
  for (Fuel f : kAllFuels) {
    if (to_string(f) == tag) return f;
  }
  throw std::invalid_argument(fmt::format("unknown fuel tag '{}'", tag));
}

double default_generation_cost(Fuel f) {
  switch (f) {
    case Fuel::kNuclear: return 6.0;
    case Fuel::kCoal: return 31.0;
    case Fuel::kGas: return 22.0;
    default: return 0.0;
  }
}

int Grid::bus_index(std::string_view id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

namespace {

class Checker {
 public:
  explicit Checker(const Grid& g) : g_(g) {}

  void bus_ref(std::string_view kind, const std::string& id, int bus) const {
    if (bus < 0 || bus >= static_cast<int>(g_.buses.size())) {
      fail(kind, id, fmt::format("references unknown bus index {}", bus));
    }
  }

  void unique(std::string_view kind, const std::string& id) {
    if (id.empty()) fail(kind, id, "has an empty id");
    // Bus ids have their own namespace; every other entity id is global so
    // that profile rows can reference it unambiguously.
    const std::string key = kind == "bus" ? "bus/" + id : id;
    if (!ids_.insert(key).second) fail(kind, id, "duplicate id");
    if (id.find_first_of(",\n\r\"") != std::string::npos) fail(kind, id, "id contains a CSV delimiter");
  }

  [[noreturn]] static void fail(std::string_view kind, const std::string& id,
                                const std::string& what) {
    throw ValidationError(fmt::format("{} '{}': {}", kind, id, what));
  }

 private:
  const Grid& g_;
  std::set<std::string> ids_;
};

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void Grid::validate() const {
  Checker c(*this);
  if (buses.empty()) throw ValidationError("grid has no buses");
  for (const Bus& b : buses) {
    c.unique("bus", b.id);
    if (!(b.theta_min <= b.theta_max)) Checker::fail("bus", b.id, "theta_min > theta_max");
  }
  for (const Line& l : lines) {
    c.unique("line", l.id);
    c.bus_ref("line", l.id, l.from);
    c.bus_ref("line", l.id, l.to);
    if (l.from == l.to) Checker::fail("line", l.id, "connects a bus to itself");
    if (!(std::isfinite(l.flow_limit) && l.flow_limit > 0.0)) {
      Checker::fail("line", l.id, "flow_limit must be > 0");
    }
    if (!(std::isfinite(l.susceptance) && l.susceptance > 0.0)) {
      Checker::fail("line", l.id, "susceptance must be > 0");
    }
  }
  for (const Generator& g : generators) {
    c.unique("generator", g.id);
    c.bus_ref("generator", g.id, g.bus);
    if (!finite_nonneg(g.capacity)) Checker::fail("generator", g.id, "capacity must be >= 0");
    if (!finite_nonneg(g.ramp_up) || !finite_nonneg(g.ramp_down)) {
      Checker::fail("generator", g.id, "ramp limits must be >= 0");
    }
    if (!std::isfinite(g.cost)) Checker::fail("generator", g.id, "cost must be finite");
  }
  for (const ImportPoint& m : imports) {
    c.unique("import", m.id);
    c.bus_ref("import", m.id, m.bus);
  }
  for (const auto* farms : {&wind, &solar, &other}) {
    for (const RenewableFarm& f : *farms) {
      c.unique("renewable", f.id);
      c.bus_ref("renewable", f.id, f.bus);
    }
  }
  for (const Load& d : loads) {
    c.unique("load", d.id);
    c.bus_ref("load", d.id, d.bus);
  }
  for (const Datacenter& d : datacenters) {
    c.unique("datacenter", d.id);
    c.bus_ref("datacenter", d.id, d.bus);
    if (!finite_nonneg(d.power_max)) Checker::fail("datacenter", d.id, "power_max must be >= 0");
    if (!(0.0 <= d.util_min && d.util_min <= d.util_avg && d.util_avg <= d.util_max &&
          d.util_max <= 1.0)) {
      Checker::fail("datacenter", d.id,
                    "requires 0 <= util_min <= util_avg <= util_max <= 1");
    }
  }

  // Connectivity of the line graph (union-find).
  std::vector<int> parent(buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Line& l : lines) parent[find(l.from)] = find(l.to);
  const int root = find(0);
  for (std::size_t i = 1; i < buses.size(); ++i) {
    if (find(static_cast<int>(i)) != root) {
      throw ValidationError(fmt::format("line graph is disconnected: bus '{}' unreachable from '{}'",
                                        buses[i].id, buses[0].id));
    }
  }
}

}  // namespace dcflex::grid
