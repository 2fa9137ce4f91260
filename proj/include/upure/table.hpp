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

#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace upure {

// A CSV-shaped result: named columns, rows of numbers or labels.
struct Table {
  using Cell = std::variant<double, std::string>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Numbers render with 10 significant digits ("%.10g"); infinities as "inf".
std::string format_number(double value);

// Writes `preamble` lines prefixed with "# ", then the header row, then the
// rows. Throws std::invalid_argument on a row of the wrong width.
void write_csv(std::ostream& out, const Table& table, const std::vector<std::string>& preamble = {});

}  // namespace upure
