// Copyright 2026 The UPure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "upure/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace upure {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

void write_csv(std::ostream& out, const Table& table, const std::vector<std::string>& preamble) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("table row has " + std::to_string(row.size()) +
                                  " cells, expected " + std::to_string(table.columns.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const auto* d = std::get_if<double>(&row[i])) {
        out << format_number(*d);
      } else {
        out << std::get<std::string>(row[i]);
      }
    }
    out << '\n';
  }
}

}  // namespace upure
