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

#include "upure/purify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upure/errors.hpp"
#include "upure/parallel.hpp"
#include "upure/spectral.hpp"

namespace upure::purify {
namespace {

// Calls fn(channel, row, col) for every coefficient of the bottom-right
// tau x tau block, channel-major then row-major.
template <typename Fn>
void for_each_in_block(const Shape& shape, int tau, Fn&& fn) {
  for (int ch = 0; ch < shape.channels; ++ch) {
    for (int r = shape.height - tau; r < shape.height; ++r) {
      for (int c = shape.width - tau; c < shape.width; ++c) fn(ch, r, c);
    }
  }
}

int reflect_101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

template <typename Op>
std::vector<Image> map_dataset(std::span<const Image> dataset, std::uint64_t seed, int workers,
                               Op&& op) {
  std::vector<Image> out(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t i) {
    try {
      Rng rng = stream_for(seed, i);
      out[i] = op(dataset[i], rng);
    } catch (const std::exception& e) {
      throw ItemError(i, e.what(), std::current_exception());
    }
  });
  return out;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kTurnToZero:
      return "turn_to_zero";
    case Strategy::kReplaceFromOther:
      return "replace_from_other";
    case Strategy::kAddPerturbation:
      return "add_perturbation";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "zero" || text == "turn_to_zero") return Strategy::kTurnToZero;
  if (text == "replace" || text == "replace_from_other") return Strategy::kReplaceFromOther;
  if (text == "perturb" || text == "add_perturbation") return Strategy::kAddPerturbation;
  throw std::invalid_argument("unknown strategy '" + std::string(text) +
                              "' (expected zero, replace or perturb)");
}

void validate(const PurifyConfig& cfg) {
  if (cfg.tau < 1) throw std::invalid_argument("tau must be at least 1");
  if (!(cfg.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  if (cfg.epsilon > 0.0 && cfg.sigma == 0.0) {
    throw std::invalid_argument("epsilon > 0 requires sigma > 0");
  }
  if (cfg.resample_budget < 1) throw std::invalid_argument("resample budget must be positive");
}

Spectrum turn_to_zero(const Spectrum& spectrum, int tau) {
  spectral::check_region(spectrum.shape(), tau);
  Spectrum out = spectrum;
  for_each_in_block(out.shape(), tau, [&](int ch, int r, int c) { out.at(ch, r, c) = 0.0; });
  return out;
}

Spectrum replace_from_other(const Spectrum& spectrum, const Spectrum& donor, int tau) {
  if (donor.shape() != spectrum.shape()) {
    throw std::invalid_argument("donor shape " + to_string(donor.shape()) +
                                " does not match image shape " + to_string(spectrum.shape()));
  }
  spectral::check_region(spectrum.shape(), tau);
  Spectrum out = spectrum;
  for_each_in_block(out.shape(), tau,
                    [&](int ch, int r, int c) { out.at(ch, r, c) = donor.at(ch, r, c); });
  return out;
}

Spectrum add_perturbation(const Spectrum& spectrum, int tau, double sigma, double epsilon, Rng& rng,
                          int resample_budget) {
  spectral::check_region(spectrum.shape(), tau);
  if (!(sigma >= 0.0) || !(epsilon >= 0.0)) {
    throw std::invalid_argument("sigma and epsilon must be non-negative");
  }
  if (epsilon > 0.0 && sigma == 0.0) throw std::invalid_argument("epsilon > 0 requires sigma > 0");

  const auto count = static_cast<std::size_t>(spectrum.channels()) * static_cast<std::size_t>(tau) *
                     static_cast<std::size_t>(tau);
  std::vector<double> noise(count);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int draw = 0;; ++draw) {
    if (draw == resample_budget) {
      throw NumericError("perturbation norm never exceeded epsilon=" + std::to_string(epsilon) +
                         " in " + std::to_string(resample_budget) + " draws");
    }
    double norm2 = 0.0;
    for (double& v : noise) {
      v = sigma * gauss(rng);
      norm2 += v * v;
    }
    if (epsilon == 0.0 || std::sqrt(norm2) > epsilon) break;
  }

  Spectrum out = spectrum;
  std::size_t i = 0;
  for_each_in_block(out.shape(), tau, [&](int ch, int r, int c) { out.at(ch, r, c) += noise[i++]; });
  return out;
}

Image purify_image(const Image& image, const PurifyConfig& cfg, std::span<const Image> donor_pool,
                   Rng& rng) {
  validate(cfg);
  spectral::check_region(image.shape(), cfg.tau);
  const Spectrum spectrum = spectral::dct2(image);
  Spectrum purified;
  switch (cfg.strategy) {
    case Strategy::kTurnToZero:
      purified = turn_to_zero(spectrum, cfg.tau);
      break;
    case Strategy::kReplaceFromOther: {
      if (donor_pool.empty()) {
        throw std::invalid_argument("replace_from_other needs a non-empty donor pool");
      }
      std::uniform_int_distribution<std::size_t> pick(0, donor_pool.size() - 1);
      purified = replace_from_other(spectrum, spectral::dct2(donor_pool[pick(rng)]), cfg.tau);
      break;
    }
    case Strategy::kAddPerturbation:
      purified =
          add_perturbation(spectrum, cfg.tau, cfg.sigma, cfg.epsilon, rng, cfg.resample_budget);
      break;
  }
  return clip_to_pixels(spectral::idct2(purified, image.range_max()));
}

std::vector<Image> purify_dataset(std::span<const Image> dataset, const PurifyConfig& cfg,
                                  std::span<const Image> donor_pool, int workers) {
  validate(cfg);
  if (cfg.strategy == Strategy::kReplaceFromOther && donor_pool.empty() && !dataset.empty()) {
    throw std::invalid_argument("replace_from_other needs a non-empty donor pool");
  }
  return map_dataset(dataset, cfg.seed, workers, [&](const Image& image, Rng& rng) {
    return purify_image(image, cfg, donor_pool, rng);
  });
}

Placement draw_cutout(const Shape& shape, const CutoutConfig& cfg, Rng& rng) {
  if (cfg.cut_height < 1 || cfg.cut_width < 1 || cfg.cut_height >= shape.height ||
      cfg.cut_width >= shape.width) {
    throw std::invalid_argument("cutout " + std::to_string(cfg.cut_height) + "x" +
                                std::to_string(cfg.cut_width) + " must be smaller than image " +
                                std::to_string(shape.height) + "x" + std::to_string(shape.width));
  }
  std::uniform_int_distribution<int> row(0, shape.height - cfg.cut_height);
  std::uniform_int_distribution<int> col(0, shape.width - cfg.cut_width);
  Placement at;
  at.row = row(rng);
  at.col = col(rng);
  return at;
}

Image apply_cutout(const Image& image, const CutoutConfig& cfg, Placement at) {
  if (at.row < 0 || at.col < 0 || at.row + cfg.cut_height > image.height() ||
      at.col + cfg.cut_width > image.width()) {
    throw std::invalid_argument("cutout block does not fit at the requested position");
  }
  Image out = image;
  for (int ch = 0; ch < out.channels(); ++ch) {
    for (int r = at.row; r < at.row + cfg.cut_height; ++r) {
      for (int c = at.col; c < at.col + cfg.cut_width; ++c) out.at(ch, r, c) = cfg.fill_value;
    }
  }
  return out;
}

Image cutout(const Image& image, const CutoutConfig& cfg, Rng& rng) {
  return apply_cutout(image, cfg, draw_cutout(image.shape(), cfg, rng));
}

std::vector<Image> cutout_dataset(std::span<const Image> dataset, const CutoutConfig& cfg,
                                  int workers) {
  return map_dataset(dataset, cfg.seed, workers,
                     [&](const Image& image, Rng& rng) { return cutout(image, cfg, rng); });
}

std::vector<double> gaussian_kernel(int kernel, double sigma) {
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("kernel size must be odd");
  if (sigma <= 0.0) sigma = 0.3 * ((kernel - 1) * 0.5 - 1.0) + 0.8;
  std::vector<double> weights(static_cast<std::size_t>(kernel));
  const int half = kernel / 2;
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    weights[static_cast<std::size_t>(i + half)] = w;
    sum += w;
  }
  for (double& w : weights) w /= sum;
  return weights;
}

Image smooth_baseline(const Image& image, SmoothKind kind, int kernel, double sigma_s) {
  if (kernel < 3 || kernel % 2 == 0) {
    throw std::invalid_argument("smoothing kernel must be odd and at least 3, got " +
                                std::to_string(kernel));
  }
  const int half = kernel / 2;
  const int h = image.height();
  const int w = image.width();
  Image out = image;

  if (kind == SmoothKind::kGaussian) {
    const auto weights = gaussian_kernel(kernel, sigma_s);
    Image tmp = image;
    for (int ch = 0; ch < image.channels(); ++ch) {
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          double acc = 0.0;
          for (int k = -half; k <= half; ++k) {
            acc += weights[static_cast<std::size_t>(k + half)] * image.at(ch, r, reflect_101(c + k, w));
          }
          tmp.at(ch, r, c) = acc;
        }
      }
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          double acc = 0.0;
          for (int k = -half; k <= half; ++k) {
            acc += weights[static_cast<std::size_t>(k + half)] * tmp.at(ch, reflect_101(r + k, h), c);
          }
          out.at(ch, r, c) = acc;
        }
      }
    }
    return out;
  }

  std::vector<double> window(static_cast<std::size_t>(kernel * kernel));
  for (int ch = 0; ch < image.channels(); ++ch) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        std::size_t n = 0;
        for (int dr = -half; dr <= half; ++dr) {
          for (int dc = -half; dc <= half; ++dc) {
            window[n++] = image.at(ch, reflect_101(r + dr, h), reflect_101(c + dc, w));
          }
        }
        auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
        std::nth_element(window.begin(), mid, window.end());
        out.at(ch, r, c) = *mid;
      }
    }
  }
  return out;
}

}  // namespace upure::purify
