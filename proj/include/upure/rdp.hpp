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

#include <span>
#include <vector>

#include "upure/bounds.hpp"
#include "upure/image.hpp"
#include "upure/table.hpp"

namespace upure::rdp {

struct GaussianSource {
  double sigma_x = 1.0;
};

// Rate in bits per sample, distortion as expected squared error, perception
// as squared Wasserstein-2 distance.
struct RdpPoint {
  double rate = 0.0;
  double distortion = 0.0;
  double perception = 0.0;
};

// Rate-distortion-perception function of a scalar Gaussian source under
// squared error and squared W2, in bits.
//
// With s = sigma_x - sqrt(P):
//   sqrt(P) <= sigma_x - sqrt(|sigma_x^2 - D|):
//     R = 1/2 log2( sigma_x^2 s^2 / (sigma_x^2 s^2 - ((sigma_x^2 + s^2 - D) / 2)^2) )
//   otherwise:
//     R = max(1/2 log2(sigma_x^2 / D), 0)
//
// Throws std::invalid_argument for D <= 0, P < 0 or sigma_x <= 0, and
// NumericError when the first branch's denominator is not positive.
double rdp_gaussian(const GaussianSource& src, double distortion, double perception);

// max(1/2 log2(sigma_x^2 / D), 0).
double rd_shannon(const GaussianSource& src, double distortion);

// True when (D, P) falls in the perception-constrained (first) branch.
bool perception_active(const GaussianSource& src, double distortion, double perception);

std::vector<RdpPoint> rdp_curve(const GaussianSource& src, double perception,
                                std::span<const double> distortions);

// Columns D, P, rate_bits.
Table curve_table(std::span<const RdpPoint> curve);

// Mean over images of the per-pixel mean squared error.
double measure_distortion(std::span<const Image> a, std::span<const Image> b);

// Mean over pixel positions and channels of (mu_a - mu_b)^2 + (s_a - s_b)^2,
// where mu and s are the per-position mean and sample standard deviation
// (n - 1 denominator) across each dataset: the squared W2 distance between
// per-position scalar Gaussian fits. Needs at least 2 images per side.
double measure_perception(std::span<const Image> a, std::span<const Image> b);

// Largest beta in [1, N - M - 1] with p_repet_lower >= target (params.beta
// is ignored). Throws NumericError if even beta = 1 misses the target.
int min_beta_for_target(double target, const bounds::RepetTriggerParams& params);

// Smallest tau with tau^2 >= ceil(beta / channels).
int min_tau(int beta, int channels);

}  // namespace upure::rdp
