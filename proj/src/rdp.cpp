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

#include "upure/rdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "upure/errors.hpp"

namespace upure::rdp {
namespace {

void check_inputs(const GaussianSource& src, double distortion, double perception) {
  if (!(src.sigma_x > 0.0) || !std::isfinite(src.sigma_x)) {
    throw std::invalid_argument("sigma_x must be positive and finite");
  }
  if (!(distortion > 0.0) || !std::isfinite(distortion)) {
    throw std::invalid_argument("distortion must be positive and finite");
  }
  if (!(perception >= 0.0) || !std::isfinite(perception)) {
    throw std::invalid_argument("perception must be non-negative and finite");
  }
}

void check_pair(std::span<const Image> a, std::span<const Image> b, bool same_count) {
  if (same_count && a.size() != b.size()) {
    throw std::invalid_argument("datasets differ in size: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  const auto check_shapes = [](std::span<const Image> ds, const Shape& shape) {
    for (const auto& img : ds) {
      if (img.shape() != shape) {
        throw std::invalid_argument("image shape " + to_string(img.shape()) + " differs from " +
                                    to_string(shape));
      }
    }
  };
  if (a.empty() || b.empty()) return;
  check_shapes(a, a.front().shape());
  check_shapes(b, a.front().shape());
}

struct PositionStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

PositionStats position_stats(std::span<const Image> ds) {
  const std::size_t size = ds.front().shape().size();
  std::vector<double> mean(size, 0.0);
  for (const auto& img : ds) {
    const auto v = img.values();
    for (std::size_t i = 0; i < size; ++i) mean[i] += v[i];
  }
  const auto n = static_cast<double>(ds.size());
  for (double& m : mean) m /= n;
  // Two-pass variance around the mean.
  std::vector<double> var(size, 0.0);
  for (const auto& img : ds) {
    const auto v = img.values();
    for (std::size_t i = 0; i < size; ++i) {
      const double d = v[i] - mean[i];
      var[i] += d * d;
    }
  }
  PositionStats stats{std::move(mean), std::vector<double>(size)};
  for (std::size_t i = 0; i < size; ++i) stats.stddev[i] = std::sqrt(var[i] / (n - 1.0));
  return stats;
}

}  // namespace

bool perception_active(const GaussianSource& src, double distortion, double perception) {
  check_inputs(src, distortion, perception);
  const double sigma2 = src.sigma_x * src.sigma_x;
  return std::sqrt(perception) <= src.sigma_x - std::sqrt(std::abs(sigma2 - distortion));
}

double rdp_gaussian(const GaussianSource& src, double distortion, double perception) {
  if (!perception_active(src, distortion, perception)) return rd_shannon(src, distortion);

  const double sigma2 = src.sigma_x * src.sigma_x;
  const double s = src.sigma_x - std::sqrt(perception);
  const double s2 = s * s;
  const double mid = (sigma2 + s2 - distortion) / 2.0;
  const double numer = sigma2 * s2;
  const double denom = numer - mid * mid;
  if (!(denom > 0.0) || !(numer > 0.0)) {
    throw NumericError("degenerate rate-distortion-perception inputs: sigma_x=" +
                       std::to_string(src.sigma_x) + " D=" + std::to_string(distortion) +
                       " P=" + std::to_string(perception));
  }
  const double rate = 0.5 * std::log2(numer / denom);
  if (!std::isfinite(rate)) throw NumericError("rate is not finite");
  return std::max(rate, 0.0);
}

double rd_shannon(const GaussianSource& src, double distortion) {
  check_inputs(src, distortion, 0.0);
  return std::max(0.5 * std::log2(src.sigma_x * src.sigma_x / distortion), 0.0);
}

std::vector<RdpPoint> rdp_curve(const GaussianSource& src, double perception,
                                std::span<const double> distortions) {
  std::vector<RdpPoint> curve;
  curve.reserve(distortions.size());
  for (double d : distortions) curve.push_back({rdp_gaussian(src, d, perception), d, perception});
  return curve;
}

Table curve_table(std::span<const RdpPoint> curve) {
  Table table;
  table.columns = {"D", "P", "rate_bits"};
  for (const auto& pt : curve) table.rows.push_back({pt.distortion, pt.perception, pt.rate});
  return table;
}

double measure_distortion(std::span<const Image> a, std::span<const Image> b) {
  check_pair(a, b, true);
  if (a.empty()) throw std::invalid_argument("distortion needs at least one image pair");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a[i].values();
    const auto y = b[i].values();
    double sq = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - y[j];
      sq += d * d;
    }
    total += sq / static_cast<double>(x.size());
  }
  return total / static_cast<double>(a.size());
}

double measure_perception(std::span<const Image> a, std::span<const Image> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("perception needs at least 2 images per dataset");
  }
  check_pair(a, b, false);
  const auto sa = position_stats(a);
  const auto sb = position_stats(b);
  double total = 0.0;
  for (std::size_t i = 0; i < sa.mean.size(); ++i) {
    const double dm = sa.mean[i] - sb.mean[i];
    const double ds = sa.stddev[i] - sb.stddev[i];
    total += dm * dm + ds * ds;
  }
  return total / static_cast<double>(sa.mean.size());
}

int min_beta_for_target(double target, const bounds::RepetTriggerParams& params) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw std::invalid_argument("target probability must lie in (0, 1]");
  }
  bounds::RepetTriggerParams p = params;
  int best = 0;
  // p_repet_lower is non-increasing in beta, so stop at the first miss.
  for (int beta = 1; beta <= p.changeable(); ++beta) {
    p.beta = beta;
    if (bounds::p_repet_lower(p) < target) break;
    best = beta;
  }
  if (best == 0) {
    throw NumericError("target failure probability " + std::to_string(target) +
                       " is unattainable even at beta = 1");
  }
  return best;
}

int min_tau(int beta, int channels) {
  if (beta < 1) throw std::invalid_argument("beta must be positive");
  if (channels < 1) throw std::invalid_argument("channels must be positive");
  const int per_channel = (beta + channels - 1) / channels;
  int tau = 1;
  while (tau * tau < per_channel) ++tau;
  return tau;
}

}  // namespace upure::rdp
