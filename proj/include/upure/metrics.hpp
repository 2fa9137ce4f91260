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
#include <span>

#include "upure/image.hpp"
#include "upure/table.hpp"

namespace upure::metrics {

// 10 log10(range_max^2 / MSE) using a's range_max. Identical images give
// +infinity.
double psnr(const Image& a, const Image& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

// Mean SSIM over every channel and every fully contained 11x11 Gaussian
// window (std 1.5), K1 = 0.01, K2 = 0.03. Channels are scored separately,
// without luminance conversion. Needs min(H, W) >= 11.
double ssim(const Image& a, const Image& b);

struct FidelityReport {
  // Mean and population std over pairs with finite PSNR; +inf when every
  // pair is identical.
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
  std::size_t n = 0;
  std::size_t n_infinite_psnr = 0;
};

// Aggregates are computed from sorted per-pair values, so the report does
// not depend on pair order.
FidelityReport batch_fidelity(std::span<const Image> originals, std::span<const Image> processed,
                              int workers = 1);

// Columns psnr_mean, psnr_std, ssim_mean, ssim_std, n, n_infinite_psnr.
Table report_table(const FidelityReport& report);

}  // namespace upure::metrics
