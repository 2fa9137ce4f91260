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
#include <stdexcept>
#include <string>
#include <vector>

namespace upure {

inline constexpr double kDefaultRangeMax = 255.0;

// Grid dimensions shared by images and spectra.
struct Shape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::size_t size() const { return plane_size() * static_cast<std::size_t>(channels); }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

// Throws std::invalid_argument unless height, width >= 1 and channels is 1 or 3.
void validate_shape(const Shape& shape);

// Channel-planar (C, H, W) grid of doubles. Base storage for Image and
// Spectrum; the two differ only in what the values mean.
class PlanarGrid {
 public:
  PlanarGrid() = default;
  explicit PlanarGrid(Shape shape, double fill = 0.0);
  PlanarGrid(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }

  double& at(int channel, int row, int col) { return values_[index(channel, row, col)]; }
  double at(int channel, int row, int col) const { return values_[index(channel, row, col)]; }

  std::span<double> plane(int channel);
  std::span<const double> plane(int channel) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Sum of squared values over every channel.
  double energy() const;

  friend bool operator==(const PlanarGrid&, const PlanarGrid&) = default;

 protected:
  std::size_t index(int channel, int row, int col) const {
    return (static_cast<std::size_t>(channel) * static_cast<std::size_t>(shape_.height) +
            static_cast<std::size_t>(row)) *
               static_cast<std::size_t>(shape_.width) +
           static_cast<std::size_t>(col);
  }

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Pixel intensities. Values produced by the pipeline may temporarily leave
// [0, range_max] (e.g. straight out of the inverse transform); use
// clip_to_pixels() to restore the invariant and in_range() to check it.
class Image : public PlanarGrid {
 public:
  Image() = default;
  explicit Image(Shape shape, double fill = 0.0, double range_max = kDefaultRangeMax);
  Image(Shape shape, std::vector<double> values, double range_max = kDefaultRangeMax);

  double range_max() const { return range_max_; }
  bool in_range() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  double range_max_ = kDefaultRangeMax;
};

// Per-channel DCT coefficients of an Image with the same shape.
class Spectrum : public PlanarGrid {
 public:
  using PlanarGrid::PlanarGrid;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

// Clamps every value into [0, range_max].
Image clip_to_pixels(const Image& image);

}  // namespace upure
