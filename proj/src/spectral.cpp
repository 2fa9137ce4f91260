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

#include "upure/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace upure::spectral {
namespace {

// Basis matrices are reused across every image of a dataset. std::map keeps
// references stable while a second size is inserted.
const std::vector<double>& cached_basis(int n) {
  thread_local std::map<int, std::vector<double>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, dct_basis(n)).first;
  return it->second;
}

// out = B * in * B^T (forward) or B^T * in * B (inverse) for one H x W plane.
void separable_transform(std::span<const double> in, std::span<double> out, int height, int width,
                         bool inverse) {
  const auto& row_basis = cached_basis(height);
  const auto& col_basis = cached_basis(width);
  const auto h = static_cast<std::size_t>(height);
  const auto w = static_cast<std::size_t>(width);

  // Along columns (the width axis) first.
  std::vector<double> tmp(h * w, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t k = 0; k < w; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < w; ++c) {
        const double b = inverse ? col_basis[c * w + k] : col_basis[k * w + c];
        acc += b * in[r * w + c];
      }
      tmp[r * w + k] = acc;
    }
  }
  // Then along rows.
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t c = 0; c < w; ++c) out[k * w + c] = 0.0;
    for (std::size_t r = 0; r < h; ++r) {
      const double b = inverse ? row_basis[r * h + k] : row_basis[k * h + r];
      if (b == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) out[k * w + c] += b * tmp[r * w + c];
    }
  }
}

}  // namespace

std::vector<double> dct_basis(int n) {
  if (n < 1) throw std::invalid_argument("DCT length must be positive");
  const auto size = static_cast<std::size_t>(n);
  std::vector<double> basis(size * size);
  const double first = std::sqrt(1.0 / n);
  const double rest = std::sqrt(2.0 / n);
  for (std::size_t k = 0; k < size; ++k) {
    const double scale = k == 0 ? first : rest;
    for (std::size_t i = 0; i < size; ++i) {
      basis[k * size + i] =
          scale * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                           static_cast<double>(k) / (2.0 * n));
    }
  }
  return basis;
}

Spectrum dct2(const Image& image) {
  Spectrum out(image.shape());
  for (int ch = 0; ch < image.channels(); ++ch) {
    separable_transform(image.plane(ch), out.plane(ch), image.height(), image.width(), false);
  }
  return out;
}

Image idct2(const Spectrum& spectrum, double range_max) {
  Image out(spectrum.shape(), 0.0, range_max);
  for (int ch = 0; ch < spectrum.channels(); ++ch) {
    separable_transform(spectrum.plane(ch), out.plane(ch), spectrum.height(), spectrum.width(),
                        true);
  }
  return out;
}

ZigZagOrder::ZigZagOrder(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) throw std::invalid_argument("zig-zag dimensions must be positive");
  const auto n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  order_.reserve(n);
  rank_.assign(n, -1);
  for (int s = 0; s <= height + width - 2; ++s) {
    const int row_lo = std::max(0, s - (width - 1));
    const int row_hi = std::min(s, height - 1);
    if (s % 2 == 1) {
      for (int r = row_lo; r <= row_hi; ++r) order_.emplace_back(r, s - r);
    } else {
      for (int r = row_hi; r >= row_lo; --r) order_.emplace_back(r, s - r);
    }
  }
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const auto [r, c] = order_[k];
    rank_[static_cast<std::size_t>(r * width_ + c)] = static_cast<int>(k);
  }
}

ZigZagOrder zigzag(int height, int width) { return ZigZagOrder(height, width); }

void check_region(const Shape& shape, int tau) {
  const int limit = std::min(shape.height, shape.width);
  if (tau < 1 || tau > limit) {
    throw std::invalid_argument("region size tau=" + std::to_string(tau) +
                                " must lie in [1, " + std::to_string(limit) + "]");
  }
}

double region_energy(const Spectrum& spectrum, int tau) {
  check_region(spectrum.shape(), tau);
  const double total = spectrum.energy();
  if (total == 0.0) return 0.0;
  double inside = 0.0;
  for (int ch = 0; ch < spectrum.channels(); ++ch) {
    for (int r = spectrum.height() - tau; r < spectrum.height(); ++r) {
      for (int c = spectrum.width() - tau; c < spectrum.width(); ++c) {
        const double v = spectrum.at(ch, r, c);
        inside += v * v;
      }
    }
  }
  return inside / total;
}

double energy_beyond_rank(const Spectrum& spectrum, int k) {
  const double total = spectrum.energy();
  if (total == 0.0) return 0.0;
  const ZigZagOrder order(spectrum.height(), spectrum.width());
  double beyond = 0.0;
  for (int ch = 0; ch < spectrum.channels(); ++ch) {
    for (int i = std::max(k, 0); i < order.size(); ++i) {
      const auto [r, c] = order.position(i);
      const double v = spectrum.at(ch, r, c);
      beyond += v * v;
    }
  }
  return beyond / total;
}

}  // namespace upure::spectral
