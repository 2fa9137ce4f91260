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

#include "upure/dataset.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "upure/errors.hpp"

namespace upure::io {
namespace fs = std::filesystem;
namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

void require_byte_range(const Image& image) {
  if (image.range_max() != 255.0) {
    throw std::invalid_argument("8-bit formats need range_max 255");
  }
}

std::string numbered(std::size_t i, std::string_view ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", i);
  return std::string(buf) + std::string(ext);
}

std::vector<char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

// Interleaved HWC bytes to a planar image, and back.
Image from_interleaved(const std::uint8_t* px, int height, int width, int channels) {
  Image image(Shape{height, width, channels});
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        image.at(ch, r, c) = px[(static_cast<std::size_t>(r) * width + c) * channels + ch];
      }
    }
  }
  return image;
}

std::vector<std::uint8_t> to_interleaved(const Image& image) {
  const int channels = image.channels();
  std::vector<std::uint8_t> px(image.shape().size());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        px[(static_cast<std::size_t>(r) * image.width() + c) * channels + ch] =
            to_byte(image.at(ch, r, c));
      }
    }
  }
  return px;
}

}  // namespace

std::string_view to_string(Format format) {
  switch (format) {
    case Format::kCifar10:
      return "cifar10";
    case Format::kPng:
      return "png";
    case Format::kPpm:
      return "ppm";
  }
  return "unknown";
}

Format parse_format(std::string_view text) {
  if (text == "cifar10" || text == "bin") return Format::kCifar10;
  if (text == "png") return Format::kPng;
  if (text == "ppm") return Format::kPpm;
  throw std::invalid_argument("unsupported format '" + std::string(text) +
                              "' (expected cifar10, png or ppm)");
}

void validate(const Dataset& ds) {
  if (!ds.labels.empty() && ds.labels.size() != ds.images.size()) {
    throw std::invalid_argument("dataset has " + std::to_string(ds.labels.size()) +
                                " labels for " + std::to_string(ds.images.size()) + " images");
  }
  for (const auto& img : ds.images) {
    if (img.shape() != ds.images.front().shape()) {
      throw std::invalid_argument("dataset mixes image shapes " + to_string(img.shape()) +
                                  " and " + to_string(ds.images.front().shape()));
    }
  }
}

Dataset load_cifar10_bin(const fs::path& path) {
  const auto bytes = read_all(path);
  if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
    throw IoError(path.string() + ": length " + std::to_string(bytes.size()) +
                  " is not a positive multiple of " + std::to_string(kCifarRecordBytes) +
                  " (truncated file?)");
  }
  const std::size_t records = bytes.size() / kCifarRecordBytes;
  Dataset ds;
  ds.source_format = Format::kCifar10;
  ds.images.reserve(records);
  ds.labels.reserve(records);
  const Shape shape{kCifarSide, kCifarSide, 3};
  for (std::size_t i = 0; i < records; ++i) {
    const auto* rec = reinterpret_cast<const std::uint8_t*>(bytes.data()) + i * kCifarRecordBytes;
    ds.labels.push_back(rec[0]);
    std::vector<double> px(rec + 1, rec + kCifarRecordBytes);
    ds.images.emplace_back(shape, std::move(px));
  }
  return ds;
}

Image read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError(path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, px.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw IoError(path.string() + ": " + msg);
  }
  return from_interleaved(px.data(), static_cast<int>(png.height), static_cast<int>(png.width),
                          gray ? 1 : 3);
}

void write_png(const Image& image, const fs::path& path) {
  require_byte_range(image);
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const auto px = to_interleaved(image);
  if (!png_image_write_to_file(&png, path.c_str(), 0, px.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + png.message);
  }
}

Image read_ppm(const fs::path& path) {
  const auto bytes = read_all(path);
  std::size_t pos = 0;
  // Header tokens, skipping whitespace and '#' comments.
  auto next_token = [&]() {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      tok += bytes[pos++];
    }
    return tok;
  };
  if (next_token() != "P6") throw IoError(path.string() + ": not a binary PPM (P6)");
  int width = 0;
  int height = 0;
  int maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PPM header");
  }
  if (maxval != 255) throw IoError(path.string() + ": only 8-bit PPM (maxval 255) is supported");
  if (width < 1 || height < 1) throw IoError(path.string() + ": invalid PPM dimensions");
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (bytes.size() < pos + need) throw IoError(path.string() + ": truncated PPM pixel data");
  return from_interleaved(reinterpret_cast<const std::uint8_t*>(bytes.data()) + pos, height, width,
                          3);
}

void write_ppm(const Image& image, const fs::path& path) {
  require_byte_range(image);
  if (image.channels() != 3) throw std::invalid_argument("PPM output needs 3-channel images");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  const auto px = to_interleaved(image);
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw IoError("error writing " + path.string());
}

Dataset load_image_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".png" || ext == ".ppm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Dataset ds;
  ds.source_format = Format::kPng;
  if (files.empty()) {
    ds.warnings.push_back(dir.string() + " contains no .png or .ppm images");
    return ds;
  }
  if (files.front().extension() == ".ppm") ds.source_format = Format::kPpm;
  for (const auto& f : files) {
    ds.images.push_back(f.extension() == ".png" ? read_png(f) : read_ppm(f));
  }
  const fs::path labels = dir / "labels.txt";
  if (fs::exists(labels)) {
    std::ifstream in(labels);
    int label = 0;
    while (in >> label) ds.labels.push_back(label);
  }
  validate(ds);
  return ds;
}

Dataset load_dataset(const fs::path& path) {
  if (fs::is_directory(path)) return load_image_dir(path);
  return load_cifar10_bin(path);
}

void save_dataset(const Dataset& ds, const fs::path& path, Format format) {
  validate(ds);
  if (format == Format::kCifar10) {
    std::vector<char> bytes;
    bytes.reserve(ds.images.size() * kCifarRecordBytes);
    for (std::size_t i = 0; i < ds.images.size(); ++i) {
      const Image& img = ds.images[i];
      if (img.shape() != Shape{kCifarSide, kCifarSide, 3}) {
        throw std::invalid_argument("CIFAR-10 output needs 3x32x32 images, got " +
                                    to_string(img.shape()));
      }
      require_byte_range(img);
      const int label = ds.labels.empty() ? 0 : ds.labels[i];
      if (label < 0 || label > 255) throw std::invalid_argument("CIFAR-10 labels must fit a byte");
      bytes.push_back(static_cast<char>(label));
      for (double v : img.values()) bytes.push_back(static_cast<char>(to_byte(v)));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path.string());
    return;
  }

  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path.string() + ": " + ec.message());
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    if (format == Format::kPng) {
      write_png(ds.images[i], path / numbered(i, ".png"));
    } else {
      write_ppm(ds.images[i], path / numbered(i, ".ppm"));
    }
  }
  if (!ds.labels.empty()) {
    std::ofstream out(path / "labels.txt");
    for (int label : ds.labels) out << label << '\n';
    if (!out) throw IoError("error writing labels to " + path.string());
  }
}

void write_mask(const std::vector<bool>& mask, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  for (bool m : mask) out << (m ? "1\n" : "0\n");
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<bool> read_mask(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<bool> mask;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "0") {
      mask.push_back(false);
    } else if (line == "1") {
      mask.push_back(true);
    } else {
      throw IoError(path.string() + ": mask lines must be 0 or 1");
    }
  }
  return mask;
}

}  // namespace upure::io
