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

#include "upure/image.hpp"

#include <algorithm>
#include <numeric>

namespace upure {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.channels) + "x" + std::to_string(shape.height) + "x" +
         std::to_string(shape.width);
}

void validate_shape(const Shape& shape) {
  if (shape.height < 1 || shape.width < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " + to_string(shape));
  }
  if (shape.channels != 1 && shape.channels != 3) {
    throw std::invalid_argument("channel count must be 1 or 3, got " +
                                std::to_string(shape.channels));
  }
}

PlanarGrid::PlanarGrid(Shape shape, double fill) : shape_(shape) {
  validate_shape(shape_);
  values_.assign(shape_.size(), fill);
}

PlanarGrid::PlanarGrid(Shape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  validate_shape(shape_);
  if (values_.size() != shape_.size()) {
    throw std::invalid_argument("value count " + std::to_string(values_.size()) +
                                " does not match shape " + to_string(shape_));
  }
}

std::span<double> PlanarGrid::plane(int channel) {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(channel) * shape_.plane_size(),
                                            shape_.plane_size());
}

std::span<const double> PlanarGrid::plane(int channel) const {
  return std::span<const double>(values_).subspan(
      static_cast<std::size_t>(channel) * shape_.plane_size(), shape_.plane_size());
}

double PlanarGrid::energy() const {
  return std::inner_product(values_.begin(), values_.end(), values_.begin(), 0.0);
}

Image::Image(Shape shape, double fill, double range_max)
    : PlanarGrid(shape, fill), range_max_(range_max) {
  if (!(range_max_ > 0.0)) throw std::invalid_argument("range_max must be positive");
}

Image::Image(Shape shape, std::vector<double> values, double range_max)
    : PlanarGrid(shape, std::move(values)), range_max_(range_max) {
  if (!(range_max_ > 0.0)) throw std::invalid_argument("range_max must be positive");
}

bool Image::in_range() const {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [this](double x) { return x >= 0.0 && x <= range_max_; });
}

Image clip_to_pixels(const Image& image) {
  Image out = image;
  for (double& v : out.values()) v = std::clamp(v, 0.0, out.range_max());
  return out;
}

}  // namespace upure
