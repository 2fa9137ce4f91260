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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upure/image.hpp"
#include "upure/rng.hpp"

namespace upure::purify {

// How the bottom-right tau x tau block of every channel's spectrum is
// rewritten.
enum class Strategy {
  kTurnToZero,        // block set to 0
  kReplaceFromOther,  // block copied from a donor image's spectrum
  kAddPerturbation,   // block += Gaussian noise with norm above epsilon
};

std::string_view to_string(Strategy strategy);
// Accepts "zero", "replace", "perturb" and the snake_case enum names
// ("turn_to_zero", "replace_from_other", "add_perturbation").
Strategy parse_strategy(std::string_view text);

inline constexpr int kDefaultResampleBudget = 1000;

struct PurifyConfig {
  Strategy strategy = Strategy::kAddPerturbation;
  int tau = 16;
  // Noise std in DCT-coefficient units on the 0-255 scale.
  double sigma = 3.0;
  // Minimum Euclidean norm of the noise over the whole perturbed block.
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int resample_budget = kDefaultResampleBudget;
};

// Throws std::invalid_argument on negative sigma/epsilon, tau < 1, or a
// positive epsilon with zero sigma.
void validate(const PurifyConfig& cfg);

Spectrum turn_to_zero(const Spectrum& spectrum, int tau);

// Throws std::invalid_argument on a donor of different shape.
Spectrum replace_from_other(const Spectrum& spectrum, const Spectrum& donor, int tau);

// Adds i.i.d. N(0, sigma^2) noise to the block, redrawing the whole block's
// noise until its norm exceeds epsilon (epsilon = 0 accepts the first draw).
// Throws NumericError when `resample_budget` draws all fall short.
Spectrum add_perturbation(const Spectrum& spectrum, int tau, double sigma, double epsilon, Rng& rng,
                          int resample_budget = kDefaultResampleBudget);

// dct2 -> strategy -> idct2 -> clip. ReplaceFromOther draws its donor
// uniformly (with replacement) from `donor_pool` using `rng`.
Image purify_image(const Image& image, const PurifyConfig& cfg, std::span<const Image> donor_pool,
                   Rng& rng);

// Purifies every image independently with stream_for(cfg.seed, ordinal).
// Output is identical for any worker count. Failures surface as ItemError
// carrying the smallest failing ordinal.
std::vector<Image> purify_dataset(std::span<const Image> dataset, const PurifyConfig& cfg,
                                  std::span<const Image> donor_pool, int workers = 1);

struct CutoutConfig {
  int cut_height = 16;
  int cut_width = 16;
  double fill_value = 127.0;
  std::uint64_t seed = 0;
};

struct Placement {
  int row = 0;
  int col = 0;
};

// Uniform top-left corner over the (H - Hc + 1)(W - Wc + 1) positions where
// the block fits. Throws std::invalid_argument unless Hc < H and Wc < W.
Placement draw_cutout(const Shape& shape, const CutoutConfig& cfg, Rng& rng);

Image apply_cutout(const Image& image, const CutoutConfig& cfg, Placement at);

Image cutout(const Image& image, const CutoutConfig& cfg, Rng& rng);

std::vector<Image> cutout_dataset(std::span<const Image> dataset, const CutoutConfig& cfg,
                                  int workers = 1);

enum class SmoothKind { kGaussian, kMedian };

// Normalized 1D Gaussian weights of odd length `kernel`. sigma <= 0 selects
// 0.3 * ((kernel - 1) / 2 - 1) + 0.8.
std::vector<double> gaussian_kernel(int kernel, double sigma);

// Per-channel spatial smoothing with mirror (reflect-101) borders. Throws
// std::invalid_argument for an even kernel or one smaller than 3.
Image smooth_baseline(const Image& image, SmoothKind kind, int kernel, double sigma_s = 0.0);

}  // namespace upure::purify
