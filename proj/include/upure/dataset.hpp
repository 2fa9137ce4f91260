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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "upure/image.hpp"

namespace upure::io {

enum class Format { kCifar10, kPng, kPpm };

std::string_view to_string(Format format);
Format parse_format(std::string_view text);

// Images share one shape; labels are either empty or one per image.
struct Dataset {
  std::vector<Image> images;
  std::vector<int> labels;
  Format source_format = Format::kCifar10;
  std::vector<std::string> warnings;
};

void validate(const Dataset& ds);

inline constexpr int kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + 3 * 32 * 32;

// CIFAR-10 binary batch: records of 1 label byte followed by 3072 pixel
// bytes, channel-planar (R, G, B planes), each plane row-major.
Dataset load_cifar10_bin(const std::filesystem::path& path);

// Reads every *.png and *.ppm file in name order. An optional labels.txt
// (one integer per line) supplies labels. An empty directory yields an empty
// dataset with a warning.
Dataset load_image_dir(const std::filesystem::path& dir);

// Directory -> load_image_dir, anything else -> load_cifar10_bin.
Dataset load_dataset(const std::filesystem::path& path);

// 8-bit formats store round(clamp(v, 0, 255)). CIFAR-10 requires 3x32x32
// images and writes label 0 when labels are absent. PNG/PPM write one file
// per image (000000.png, ...) plus labels.txt when labels are present.
void save_dataset(const Dataset& ds, const std::filesystem::path& path, Format format);

Image read_png(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

// Poison mask sidecar: one "0" or "1" line per image ordinal.
void write_mask(const std::vector<bool>& mask, const std::filesystem::path& path);
std::vector<bool> read_mask(const std::filesystem::path& path);

}  // namespace upure::io
