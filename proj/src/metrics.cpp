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

#include "upure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "upure/parallel.hpp"
#include "upure/purify.hpp"

namespace upure::metrics {
namespace {

void check_same_shape(const Image& a, const Image& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("image shapes differ: " + to_string(a.shape()) + " vs " +
                                to_string(b.shape()));
  }
}

// Weighted sums over every fully contained window, separable in rows/cols.
// `in` is H x W; result is (H - k + 1) x (W - k + 1).
std::vector<double> filter_valid(const std::vector<double>& in, int h, int w,
                                 const std::vector<double>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int oh = h - k + 1;
  const int ow = w - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h * ow), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * in[static_cast<std::size_t>(r * w + c + i)];
      rows[static_cast<std::size_t>(r * ow + c)] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh * ow), 0.0);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * rows[static_cast<std::size_t>((r + i) * ow + c)];
      out[static_cast<std::size_t>(r * ow + c)] = acc;
    }
  }
  return out;
}

double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

void mean_std(const std::vector<double>& values, double& mean, double& stddev) {
  const auto n = static_cast<double>(values.size());
  mean = sorted_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  stddev = std::sqrt(sorted_sum(std::move(sq)) / n);
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  check_same_shape(a, b);
  const auto x = a.values();
  const auto y = b.values();
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
  if (sq == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sq / static_cast<double>(x.size());
  return 10.0 * std::log10(a.range_max() * a.range_max() / mse);
}

double ssim(const Image& a, const Image& b) {
  check_same_shape(a, b);
  const int h = a.height();
  const int w = a.width();
  if (std::min(h, w) < kSsimWindow) {
    throw std::invalid_argument("SSIM needs images of at least " + std::to_string(kSsimWindow) +
                                " pixels per side, got " + std::to_string(h) + "x" +
                                std::to_string(w));
  }
  const auto kernel = purify::gaussian_kernel(kSsimWindow, kSsimSigma);
  const double c1 = std::pow(0.01 * a.range_max(), 2);
  const double c2 = std::pow(0.03 * a.range_max(), 2);
  const auto n = static_cast<std::size_t>(h * w);

  double total = 0.0;
  std::size_t windows = 0;
  for (int ch = 0; ch < a.channels(); ++ch) {
    const auto pa = a.plane(ch);
    const auto pb = b.plane(ch);
    std::vector<double> x(pa.begin(), pa.end());
    std::vector<double> y(pb.begin(), pb.end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mu_x = filter_valid(x, h, w, kernel);
    const auto mu_y = filter_valid(y, h, w, kernel);
    const auto e_xx = filter_valid(xx, h, w, kernel);
    const auto e_yy = filter_valid(yy, h, w, kernel);
    const auto e_xy = filter_valid(xy, h, w, kernel);
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
      const double mx = mu_x[i];
      const double my = mu_y[i];
      const double vx = e_xx[i] - mx * mx;
      const double vy = e_yy[i] - my * my;
      const double cov = e_xy[i] - mx * my;
      total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    windows += mu_x.size();
  }
  return total / static_cast<double>(windows);
}

FidelityReport batch_fidelity(std::span<const Image> originals, std::span<const Image> processed,
                              int workers) {
  if (originals.size() != processed.size()) {
    throw std::invalid_argument("datasets differ in size: " + std::to_string(originals.size()) +
                                " vs " + std::to_string(processed.size()));
  }
  if (originals.empty()) throw std::invalid_argument("fidelity needs at least one image pair");
  std::vector<double> psnrs(originals.size());
  std::vector<double> ssims(originals.size());
  parallel_for(originals.size(), workers, [&](std::size_t i) {
    psnrs[i] = psnr(originals[i], processed[i]);
    ssims[i] = ssim(originals[i], processed[i]);
  });

  FidelityReport report;
  report.n = originals.size();
  std::vector<double> finite;
  for (double p : psnrs) {
    if (std::isinf(p)) {
      ++report.n_infinite_psnr;
    } else {
      finite.push_back(p);
    }
  }
  if (finite.empty()) {
    report.psnr_mean = std::numeric_limits<double>::infinity();
    report.psnr_std = 0.0;
  } else {
    mean_std(finite, report.psnr_mean, report.psnr_std);
  }
  mean_std(ssims, report.ssim_mean, report.ssim_std);
  return report;
}

Table report_table(const FidelityReport& report) {
  Table table;
  table.columns = {"psnr_mean", "psnr_std", "ssim_mean", "ssim_std", "n", "n_infinite_psnr"};
  table.rows.push_back({report.psnr_mean, report.psnr_std, report.ssim_mean, report.ssim_std,
                        static_cast<double>(report.n),
                        static_cast<double>(report.n_infinite_psnr)});
  return table;
}

}  // namespace upure::metrics
