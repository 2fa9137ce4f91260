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
#include <variant>
#include <vector>

#include "upure/image.hpp"
#include "upure/purify.hpp"
#include "upure/rng.hpp"

namespace upure::trigger {

enum class Axes { kRows, kCols, kBoth };

// Additive grid covering the whole image. Row r is a line when
// r mod (line_width + gap) < line_width; columns likewise.
struct RepetitiveTriggerSpec {
  double intensity = 30.0;
  int line_width = 1;
  int gap = 1;
  Axes axes = Axes::kBoth;
};

struct PatchPosition {
  enum class Kind { kCorner, kFixed, kRandom };
  Kind kind = Kind::kCorner;
  int row = 0;
  int col = 0;
};

// A single rectangular trigger. `pattern` is trig_height x trig_width,
// row-major, shared by all channels; empty means solid 255.
struct PatchTriggerSpec {
  int trig_height = 4;
  int trig_width = 4;
  std::vector<double> pattern;
  PatchPosition position;
};

using TriggerSpec = std::variant<RepetitiveTriggerSpec, PatchTriggerSpec>;

void validate(const RepetitiveTriggerSpec& spec, const Shape& shape);

bool on_grid(const RepetitiveTriggerSpec& spec, int row, int col);

// The unclipped additive pattern: intensity on grid pixels, 0 elsewhere.
Image grid_delta(const Shape& shape, const RepetitiveTriggerSpec& spec);

// image + grid_delta, clipped to [0, range_max].
Image apply_repetitive(const Image& image, const RepetitiveTriggerSpec& spec);

// Resolves the patch's top-left corner; random positions are uniform over
// the (H - Ht + 1)(W - Wt + 1) cells where the patch fits.
purify::Placement resolve_patch_position(const Shape& shape, const PatchTriggerSpec& spec,
                                         Rng& rng);

// Overwrites the patch block with the pattern, then clips.
Image apply_patch(const Image& image, const PatchTriggerSpec& spec, Rng& rng);

Image apply_trigger(const Image& image, const TriggerSpec& spec, Rng& rng);

struct PoisonConfig {
  double rate = 0.002;
  std::optional<int> target_class;
  std::uint64_t seed = 0;
};

struct PoisonResult {
  std::vector<Image> images;
  std::vector<bool> mask;
  // Set when round(rate * n) is 0 and nothing was poisoned.
  std::optional<std::string> warning;
};

// round-half-up(rate * n); n is the whole dataset size.
std::size_t poison_count(double rate, std::size_t n);

// Chooses poison_count(rate, n) images uniformly without replacement (from
// the target class when one is given) and applies the trigger to each.
// Selection uses stream_for(seed, kRunLevelOrdinal); per-image randomness
// (random patch placement) uses stream_for(seed, ordinal).
PoisonResult poison_dataset(std::span<const Image> dataset, std::span<const int> labels,
                            const PoisonConfig& cfg, const TriggerSpec& trigger, int workers = 1);

}  // namespace upure::trigger
