//
// Copyright 2026 The lattice-dp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LATTICE_DP_TOOLS_CSV_IO_H_
#define LATTICE_DP_TOOLS_CSV_IO_H_

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lattice_dp/constraints.h"
#include "lattice_dp/status.h"

namespace lattice_dp::cli {

// Integer grid as read from CSV; the shape is kept so that outputs can be
// written back in the layout of the input.
struct IntegerGrid {
  std::vector<std::vector<std::int64_t>> rows;

  std::vector<std::int64_t> Flatten() const {
    std::vector<std::int64_t> out;
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
  }

  // Same shape, new values (row-major).
  IntegerGrid Reshape(const std::vector<std::int64_t>& values) const {
    IntegerGrid out;
    std::size_t next = 0;
    for (const auto& r : rows) {
      out.rows.emplace_back(values.begin() + next,
                            values.begin() + next + r.size());
      next += r.size();
    }
    return out;
  }

  friend bool operator==(const IntegerGrid&, const IntegerGrid&) = default;
};

inline std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool ParseInt64(std::string_view field, std::int64_t& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && !field.empty();
}

inline IntegerGrid ParseIntegerGrid(std::istream& in,
                                    const std::string& source = "<input>") {
  IntegerGrid grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::int64_t> row;
    for (std::string_view field : SplitFields(line)) {
      std::int64_t v;
      if (!ParseInt64(field, v)) {
        throw Error(ErrorCode::kParseError,
                    source + ":" + std::to_string(line_no) +
                        ": not an integer: '" + std::string(field) + "'");
      }
      row.push_back(v);
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

inline IntegerGrid ReadIntegerGrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ParseIntegerGrid(in, path);
}

inline void WriteIntegerGrid(std::ostream& out, const IntegerGrid& grid) {
  for (const auto& row : grid.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << (j ? "," : "") << row[j];
    }
    out << "\n";
  }
}

struct CountyRecord {
  std::string state;
  std::string county;
  std::int64_t population = 0;
};

struct StateHistogram {
  std::string state;
  std::vector<std::string> counties;  // file order
  Histogram populations;
};

// CSV with header state,county,population. States appear in order of first
// occurrence; counties keep file order within their state.
inline std::vector<StateHistogram> ParseCountyCsv(
    std::istream& in, const std::string& source = "<input>",
    std::ostream* warnings = &std::cerr) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::string> state_order;
  std::vector<std::vector<CountyRecord>> by_state;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitFields(line);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "state" || fields[1] != "county" ||
          fields[2] != "population") {
        throw Error(ErrorCode::kParseError,
                    source + ":" + std::to_string(line_no) +
                        ": expected header 'state,county,population'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParseError, source + ":" + std::to_string(line_no) +
                                              ": expected 3 fields");
    }
    CountyRecord rec{std::string(fields[0]), std::string(fields[1]), 0};
    if (!ParseInt64(fields[2], rec.population)) {
      throw Error(ErrorCode::kParseError,
                  source + ":" + std::to_string(line_no) +
                      ": population is not an integer: '" +
                      std::string(fields[2]) + "'");
    }
    if (rec.population < 0) {
      throw Error(ErrorCode::kNegativePopulation,
                  source + ":" + std::to_string(line_no) + ": county '" +
                      rec.county + "' has negative population");
    }
    std::size_t idx = 0;
    while (idx < state_order.size() && state_order[idx] != rec.state) ++idx;
    if (idx == state_order.size()) {
      state_order.push_back(rec.state);
      by_state.emplace_back();
    }
    by_state[idx].push_back(std::move(rec));
  }
  if (!have_header && warnings) {
    *warnings << "warning: " << source << " is empty; no counties loaded\n";
  }
  std::vector<StateHistogram> out;
  for (std::size_t s = 0; s < state_order.size(); ++s) {
    StateHistogram h;
    h.state = state_order[s];
    std::vector<std::int64_t> pops;
    for (const auto& rec : by_state[s]) {
      h.counties.push_back(rec.county);
      pops.push_back(rec.population);
    }
    h.populations = Histogram(std::move(pops));
    out.push_back(std::move(h));
  }
  return out;
}

inline std::vector<StateHistogram> LoadCountyCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ParseCountyCsv(in, path);
}

}  // namespace lattice_dp::cli

#endif  // LATTICE_DP_TOOLS_CSV_IO_H_
