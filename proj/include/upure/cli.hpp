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

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "upure/image.hpp"

namespace upure::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kNumeric = 3,
};

// Runs one command line (without the program name), writing results to
// `out` and diagnostics to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Flat key=value config file. Blank lines and lines starting with '#' are
// ignored; keys are flag names without the leading dashes. Throws
// std::invalid_argument on a malformed line and IoError when unreadable.
std::map<std::string, std::string> read_config(const std::filesystem::path& path);

struct Calibration {
  double sigma = 0.0;
  double psnr = 0.0;
  int evaluations = 0;
};

// Mean PSNR of AddPerturbation output (epsilon = 0) against the inputs.
double mean_perturbation_psnr(std::span<const Image> images, int tau, double sigma,
                              std::uint64_t seed, int workers);

// Bisection for the AddPerturbation sigma in [lo, hi] whose mean PSNR lands
// within `tolerance_db` of the target. Throws NumericError if the target is
// outside what the bracket can reach.
Calibration calibrate_sigma(std::span<const Image> images, int tau, double target_psnr,
                            std::uint64_t seed, int workers, double lo = 0.1, double hi = 50.0,
                            double tolerance_db = 0.1);

}  // namespace upure::cli
