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

#include "upure/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "upure/errors.hpp"
#include "upure/parallel.hpp"

namespace upure::trigger {

void validate(const RepetitiveTriggerSpec& spec, const Shape& shape) {
  if (spec.intensity == 0.0 || !std::isfinite(spec.intensity)) {
    throw std::invalid_argument("trigger intensity must be finite and non-zero");
  }
  if (spec.line_width < 1 || spec.gap < 1) {
    throw std::invalid_argument("trigger line width and gap must be positive");
  }
  if (spec.line_width + spec.gap > std::min(shape.height, shape.width)) {
    throw std::invalid_argument("trigger period exceeds the image size");
  }
}

bool on_grid(const RepetitiveTriggerSpec& spec, int row, int col) {
  const int period = spec.line_width + spec.gap;
  const bool row_line = row % period < spec.line_width;
  const bool col_line = col % period < spec.line_width;
  switch (spec.axes) {
    case Axes::kRows:
      return row_line;
    case Axes::kCols:
      return col_line;
    case Axes::kBoth:
      return row_line || col_line;
  }
  return false;
}

Image grid_delta(const Shape& shape, const RepetitiveTriggerSpec& spec) {
  validate(spec, shape);
  Image delta(shape, 0.0);
  for (int ch = 0; ch < shape.channels; ++ch) {
    for (int r = 0; r < shape.height; ++r) {
      for (int c = 0; c < shape.width; ++c) {
        if (on_grid(spec, r, c)) delta.at(ch, r, c) = spec.intensity;
      }
    }
  }
  return delta;
}

Image apply_repetitive(const Image& image, const RepetitiveTriggerSpec& spec) {
  const Image delta = grid_delta(image.shape(), spec);
  Image out = image;
  auto dst = out.values();
  auto src = delta.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return clip_to_pixels(out);
}

purify::Placement resolve_patch_position(const Shape& shape, const PatchTriggerSpec& spec,
                                         Rng& rng) {
  if (spec.trig_height < 1 || spec.trig_width < 1 || spec.trig_height > shape.height ||
      spec.trig_width > shape.width) {
    throw std::invalid_argument("patch " + std::to_string(spec.trig_height) + "x" +
                                std::to_string(spec.trig_width) + " does not fit the image");
  }
  purify::Placement at;
  switch (spec.position.kind) {
    case PatchPosition::Kind::kCorner:
      break;
    case PatchPosition::Kind::kFixed:
      at.row = spec.position.row;
      at.col = spec.position.col;
      if (at.row < 0 || at.col < 0 || at.row + spec.trig_height > shape.height ||
          at.col + spec.trig_width > shape.width) {
        throw std::invalid_argument("patch at (" + std::to_string(at.row) + "," +
                                    std::to_string(at.col) + ") exceeds the image bounds");
      }
      break;
    case PatchPosition::Kind::kRandom: {
      std::uniform_int_distribution<int> row(0, shape.height - spec.trig_height);
      std::uniform_int_distribution<int> col(0, shape.width - spec.trig_width);
      at.row = row(rng);
      at.col = col(rng);
      break;
    }
  }
  return at;
}

Image apply_patch(const Image& image, const PatchTriggerSpec& spec, Rng& rng) {
  const auto cells = static_cast<std::size_t>(spec.trig_height) * static_cast<std::size_t>(spec.trig_width);
  if (!spec.pattern.empty() && spec.pattern.size() != cells) {
    throw std::invalid_argument("patch pattern has " + std::to_string(spec.pattern.size()) +
                                " values, expected " + std::to_string(cells));
  }
  const purify::Placement at = resolve_patch_position(image.shape(), spec, rng);
  Image out = image;
  for (int ch = 0; ch < out.channels(); ++ch) {
    for (int r = 0; r < spec.trig_height; ++r) {
      for (int c = 0; c < spec.trig_width; ++c) {
        const double v = spec.pattern.empty()
                             ? 255.0
                             : spec.pattern[static_cast<std::size_t>(r * spec.trig_width + c)];
        out.at(ch, at.row + r, at.col + c) = v;
      }
    }
  }
  return clip_to_pixels(out);
}

Image apply_trigger(const Image& image, const TriggerSpec& spec, Rng& rng) {
  if (const auto* grid = std::get_if<RepetitiveTriggerSpec>(&spec)) {
    return apply_repetitive(image, *grid);
  }
  return apply_patch(image, std::get<PatchTriggerSpec>(spec), rng);
}

std::size_t poison_count(double rate, std::size_t n) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("poison rate must lie in (0, 1]");
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
}

PoisonResult poison_dataset(std::span<const Image> dataset, std::span<const int> labels,
                            const PoisonConfig& cfg, const TriggerSpec& trigger, int workers) {
  const std::size_t n = dataset.size();
  const std::size_t count = poison_count(cfg.rate, n);
  if (!labels.empty() && labels.size() != n) {
    throw std::invalid_argument("label count does not match image count");
  }

  std::vector<std::size_t> candidates;
  if (cfg.target_class) {
    if (labels.empty()) throw std::invalid_argument("a target class requires labels");
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == *cfg.target_class) candidates.push_back(i);
    }
    if (candidates.empty()) {
      throw std::invalid_argument("target class " + std::to_string(*cfg.target_class) +
                                  " does not occur in the labels");
    }
  } else {
    candidates.resize(n);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  }
  if (count > candidates.size()) {
    throw std::invalid_argument("cannot poison " + std::to_string(count) + " images from " +
                                std::to_string(candidates.size()) + " candidates");
  }

  PoisonResult result;
  result.mask.assign(n, false);
  if (count == 0) {
    result.warning = "rate " + std::to_string(cfg.rate) + " on " + std::to_string(n) +
                     " images rounds to zero poisoned images";
  }
  // Partial Fisher-Yates: the first `count` entries become a uniform sample.
  Rng selector = stream_for(cfg.seed, kRunLevelOrdinal);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(selector)]);
    result.mask[candidates[i]] = true;
  }

  result.images.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    if (!result.mask[i]) {
      result.images[i] = dataset[i];
      return;
    }
    try {
      Rng rng = stream_for(cfg.seed, i);
      result.images[i] = apply_trigger(dataset[i], trigger, rng);
    } catch (const std::exception& e) {
      throw ItemError(i, e.what(), std::current_exception());
    }
  });
  return result;
}

}  // namespace upure::trigger
