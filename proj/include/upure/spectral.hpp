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

#include <utility>
#include <vector>

#include "upure/image.hpp"

namespace upure::spectral {

// Orthonormal 2D DCT-II, applied independently to each channel. The basis is
// scaled by sqrt(1/N) for the first vector and sqrt(2/N) otherwise, so the
// transform preserves energy and coefficient (0,0) equals mean * sqrt(H*W).
Spectrum dct2(const Image& image);

// Inverse of dct2 (DCT-III with the same scaling). The result is not clipped.
Image idct2(const Spectrum& spectrum, double range_max = kDefaultRangeMax);

// Row-major N x N matrix whose row k is the k-th orthonormal DCT-II basis
// vector of length n.
std::vector<double> dct_basis(int n);

// JPEG-style zig-zag traversal: anti-diagonals r + c = s in increasing s,
// odd diagonals walked downward (row increasing), even diagonals upward.
class ZigZagOrder {
 public:
  ZigZagOrder(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  int size() const { return static_cast<int>(order_.size()); }

  // (row, col) of linear index k.
  std::pair<int, int> position(int k) const { return order_.at(static_cast<std::size_t>(k)); }
  // Linear index of (row, col).
  int rank(int row, int col) const { return rank_.at(static_cast<std::size_t>(row * width_ + col)); }

  const std::vector<std::pair<int, int>>& order() const { return order_; }

 private:
  int height_;
  int width_;
  std::vector<std::pair<int, int>> order_;
  std::vector<int> rank_;
};

ZigZagOrder zigzag(int height, int width);

// Throws std::invalid_argument unless 1 <= tau <= min(H, W).
void check_region(const Shape& shape, int tau);

// Fraction of total squared-coefficient energy inside the bottom-right
// tau x tau block (rows >= H - tau, cols >= W - tau), summed over channels.
// An all-zero spectrum reports 0.
double region_energy(const Spectrum& spectrum, int tau);

// Fraction of total energy held by coefficients at zig-zag rank >= k in each
// channel. k = 0 gives 1 for any non-zero spectrum.
double energy_beyond_rank(const Spectrum& spectrum, int k);

}  // namespace upure::spectral
