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

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>

namespace upure {

// Validation failures use std::invalid_argument. The two classes below cover
// the remaining failure kinds the command line maps to distinct exit codes.

// A computation left its numeric domain (degenerate formula branch, an
// unreachable rejection threshold, an unattainable target).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reading or writing a dataset or report failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wraps a per-image failure inside a dataset-level operation.
class ItemError : public std::runtime_error {
 public:
  ItemError(std::size_t ordinal, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("image " + std::to_string(ordinal) + ": " + what),
        ordinal_(ordinal),
        cause_(std::move(cause)) {}

  std::size_t ordinal() const { return ordinal_; }
  // The original exception, for callers that classify by type.
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::size_t ordinal_;
  std::exception_ptr cause_;
};

}  // namespace upure
