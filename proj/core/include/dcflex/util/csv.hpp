#pragma once

// Minimal CSV reader for the tidy files we produce: comma separated, no
// quoting, header row first. Blank lines are skipped.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dcflex/grid/grid.hpp"

namespace dcflex::csv {

struct CsvTable {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void require_header(std::initializer_list<const char*> expected) const {
    std::vector<std::string> want(expected.begin(), expected.end());
    if (header != want) {
      std::string joined;
      for (const auto& w : want) joined += (joined.empty() ? "" : ",") + w;
      throw grid::ValidationError(
          fmt::format("{}: expected header '{}'", path.string(), joined));
    }
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  CsvTable t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw grid::ValidationError(fmt::format("{}:{}: expected {} fields, found {}",
                                              path.string(), lineno, t.header.size(),
                                              fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw grid::ValidationError(fmt::format("{}: empty file", path.string()));
  return t;
}

// `line` is the 1-based file line used in the error message.
inline double parse_number(const std::string& s, const std::filesystem::path& path,
                           std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || s.empty()) {
    throw grid::ValidationError(
        fmt::format("{}:{}: '{}' is not a number", path.string(), line, s));
  }
  return v;
}

}  // namespace dcflex::csv
