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

// Acceptance checks, one line per criterion. Exit status is the number of
// criteria whose outcome differs from expectation; a criterion listed with
// --known-unattainable is expected to fail and is still printed as FAIL.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "upure/bounds.hpp"
#include "upure/cli.hpp"
#include "upure/dataset.hpp"
#include "upure/metrics.hpp"
#include "upure/purify.hpp"
#include "upure/rdp.hpp"
#include "upure/spectral.hpp"
#include "upure/trigger.hpp"

namespace {

namespace fs = std::filesystem;
using namespace upure;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

Image random_image(Shape shape, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Image img(shape);
  for (double& v : img.values()) v = u(rng);
  return img;
}

// 1. dct2/idct2 round trip and energy preservation.
Outcome transform_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  double max_err = 0.0;
  double max_rel = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Image x = random_image(Shape{32, 32, 3}, i, 0.0, 255.0);
    const Spectrum s = spectral::dct2(x);
    const Image back = spectral::idct2(s);
    for (std::size_t j = 0; j < x.values().size(); ++j) {
      max_err = std::max(max_err, std::abs(back.values()[j] - x.values()[j]));
    }
    max_rel = std::max(max_rel, std::abs(s.energy() - x.energy()) / x.energy());
  }
  const double t = seconds_since(start);
  return {max_err < 1e-6 && max_rel < 1e-9 && t < 10.0,
          "max roundtrip err " + fmt(max_err) + ", max Parseval rel err " + fmt(max_rel) +
              ", " + fmt(t, 3) + " s"};
}

// Cutout placements covering at least alpha trigger pixels, counted pixel
// by pixel for a trigger in the top-left corner.
std::int64_t corner_oracle(int h, int w, int hc, int wc, int ht, int wt, std::int64_t alpha) {
  std::int64_t failing = 0;
  for (int r = 0; r <= h - hc; ++r) {
    for (int c = 0; c <= w - wc; ++c) {
      std::int64_t covered = 0;
      for (int tr = 0; tr < ht; ++tr) {
        for (int tc = 0; tc < wt; ++tc) covered += tr >= r && tr < r + hc && tc >= c && tc < c + wc;
      }
      failing += covered >= alpha;
    }
  }
  return failing;
}

// 2. Exact lattice count against enumeration.
Outcome lattice_exactness() {
  const auto start = std::chrono::steady_clock::now();
  int cases = 0;
  int mismatches = 0;
  for (int ht = 1; ht <= 8; ++ht) {
    for (int wt = 1; wt <= 8; ++wt) {
      for (std::int64_t alpha = 1; alpha <= ht * wt; ++alpha) {
        const bounds::SingleTriggerParams p{32, 32, 16, 16, ht, wt, alpha};
        ++cases;
        mismatches += bounds::lattice_count(p) != corner_oracle(32, 32, 16, 16, ht, wt, alpha);
      }
    }
  }
  const bounds::SingleTriggerParams worked{32, 32, 16, 16, 8, 8, 16};
  const bool worked_ok =
      bounds::lattice_count(worked) == 33 && bounds::p_single_lower(worked) == 33.0 / 289.0;
  const double t = seconds_since(start);
  return {mismatches == 0 && worked_ok && t < 5.0,
          std::to_string(cases) + " cases, " + std::to_string(mismatches) +
              " mismatches, 8x8/alpha=16 -> " + std::to_string(bounds::lattice_count(worked)) +
              "/289, " + fmt(t, 3) + " s"};
}

// 3. The corner bound holds at arbitrary trigger positions.
Outcome lattice_bound_property() {
  const auto start = std::chrono::steady_clock::now();
  const bounds::SingleTriggerParams p{32, 32, 16, 16, 8, 8, 16};
  const double lower = bounds::p_single_lower(p);
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> pos(0, 32 - 8);
  int violations = 0;
  double min_margin = 1e300;
  for (int i = 0; i < 20; ++i) {
    const int row = pos(rng);
    const int col = pos(rng);
    const auto est = bounds::p_single_monte_carlo(p, row, col, 1000000, 100 + i, 1);
    const double margin = est.value - (lower - 3.0 * est.std_error);
    min_margin = std::min(min_margin, margin);
    violations += margin < 0.0;
  }
  const double t = seconds_since(start);
  return {violations == 0 && t < 60.0,
          "20 positions x 1e6 draws, bound " + fmt(lower) + ", " + std::to_string(violations) +
              " violations, min margin " + fmt(min_margin) + ", " + fmt(t, 3) + " s"};
}

// P[X >= beta] for X ~ Binomial(n, q), from a Pascal-triangle pmf summed
// cumulatively from the top.
double cumulative_tail(int n, double q, int beta) {
  std::vector<long double> choose(static_cast<std::size_t>(n) + 1, 0.0L);
  choose[0] = 1.0L;
  for (int i = 1; i <= n; ++i) {
    for (int k = i; k > 0; --k) choose[static_cast<std::size_t>(k)] += choose[static_cast<std::size_t>(k - 1)];
  }
  long double tail = 0.0L;
  for (int k = n; k >= beta; --k) {
    tail += choose[static_cast<std::size_t>(k)] * std::pow(static_cast<long double>(q), k) *
            std::pow(1.0L - q, n - k);
  }
  return static_cast<double>(tail);
}

// 4. Repetitive-trigger bound: exactness, sampling and dominance.
Outcome repet_exactness() {
  const auto start = std::chrono::steady_clock::now();
  const int n_total = 16;
  const std::vector<int> ms{2, 4};
  const std::vector<double> qs{0.2, 0.5, 0.8};
  double max_oracle = 0.0;
  double max_pb = 0.0;
  int mc_misses = 0;
  int mc_runs = 0;
  int mono = 0;
  std::uint64_t seed = 1;
  // value[m][q][beta]
  std::vector<std::vector<std::vector<double>>> value(ms.size());
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    for (double q : qs) {
      bounds::RepetTriggerParams p;
      p.total = n_total;
      p.preserved = ms[mi];
      p.q = q;
      const int n = p.changeable();
      std::vector<double> curve;
      for (int beta = 1; beta <= n; ++beta) {
        p.beta = beta;
        const double v = bounds::p_repet_lower(p);
        curve.push_back(v);
        max_oracle = std::max(max_oracle, std::abs(v - cumulative_tail(n, q, beta)));
        const std::vector<double> uniform(static_cast<std::size_t>(n), q);
        max_pb = std::max(max_pb, std::abs(bounds::poisson_binomial_tail(uniform, beta) - v));
        const auto est = bounds::p_repet_monte_carlo(p, 1000000, seed++, 1);
        const double se = std::sqrt(v * (1.0 - v) / 1e6);
        ++mc_runs;
        mc_misses += std::abs(est.value - v) > 3.0 * se;
      }
      for (std::size_t b = 1; b < curve.size(); ++b) mono += curve[b] > curve[b - 1];
      value[mi].push_back(std::move(curve));
    }
  }
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    for (std::size_t qi = 1; qi < qs.size(); ++qi) {
      for (std::size_t b = 0; b < value[mi][qi].size(); ++b) {
        mono += value[mi][qi][b] < value[mi][qi - 1][b];
      }
    }
  }
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    for (std::size_t b = 0; b < value[1][qi].size(); ++b) mono += value[1][qi][b] > value[0][qi][b];
  }
  const double t = seconds_since(start);
  return {max_oracle <= 1e-12 && max_pb <= 1e-12 && mc_misses == 0 && mono == 0 && t < 30.0,
          "oracle err " + fmt(max_oracle) + ", PB-vs-binomial err " + fmt(max_pb) + ", MC " +
              std::to_string(mc_misses) + "/" + std::to_string(mc_runs) +
              " beyond 3 SE, monotonicity violations " + std::to_string(mono) + ", " +
              fmt(t, 3) + " s"};
}

// 5. Combined bound is the product of both factors.
Outcome defense_product() {
  int cases = 0;
  int bad = 0;
  for (int ht = 1; ht <= 8; ++ht) {
    for (int wt = 1; wt <= 8; ++wt) {
      for (std::int64_t alpha = 1; alpha <= ht * wt; ++alpha) {
        const bounds::SingleTriggerParams sp{32, 32, 16, 16, ht, wt, alpha};
        const double ps = bounds::p_single_lower(sp);
        for (int m : {2, 4}) {
          for (double q : {0.2, 0.5, 0.8}) {
            bounds::RepetTriggerParams rp;
            rp.preserved = m;
            rp.q = q;
            for (int beta = 1; beta <= rp.changeable(); ++beta) {
              rp.beta = beta;
              const double pr = bounds::p_repet_lower(rp);
              const double pd = bounds::p_defense(sp, rp);
              ++cases;
              bad += pd != ps * pr || pd > ps || pd > pr;
            }
          }
        }
      }
    }
  }
  return {bad == 0, std::to_string(cases) + " combinations, " + std::to_string(bad) + " violations"};
}

// 6. Gaussian RDP function.
Outcome rdp_properties() {
  const auto start = std::chrono::steady_clock::now();
  double max_jump = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double sigma = 0.1 + 9.9 * i / 99.0;
    const rdp::GaussianSource src{sigma};
    for (int j = 0; j < 100; ++j) {
      const double d = sigma * sigma * 2.0 * (j + 0.5) / 100.0;
      const double root = sigma - std::sqrt(std::abs(sigma * sigma - d));
      if (root < 0.0) continue;
      const double p = root * root;
      const double at = rdp::rdp_gaussian(src, d, p);
      const double above = rdp::rdp_gaussian(src, d, std::nextafter(p, 1e300) * (1.0 + 1e-12));
      max_jump = std::max({max_jump, std::abs(at - above), std::abs(at - rdp::rd_shannon(src, d))});
    }
  }
  int mono = 0;
  for (double sigma : {0.5, 1.0, 3.0}) {
    const rdp::GaussianSource src{sigma};
    for (int a = 0; a < 60; ++a) {
      for (int b = 0; b < 60; ++b) {
        const double d = sigma * sigma * (0.01 + 2.5 * a / 60.0);
        const double p = sigma * sigma * 2.0 * b / 60.0;
        const double r = rdp::rdp_gaussian(src, d, p);
        const double dd = sigma * sigma * (0.01 + 2.5 * (a + 1) / 60.0);
        const double dp = sigma * sigma * 2.0 * (b + 1) / 60.0;
        mono += rdp::rdp_gaussian(src, dd, p) > r + 1e-12;
        mono += rdp::rdp_gaussian(src, d, dp) > r + 1e-12;
      }
    }
  }
  int shannon_bad = 0;
  for (double sigma : {0.5, 1.0, 3.0}) {
    const rdp::GaussianSource src{sigma};
    for (double frac : {0.1, 0.5, 0.9, 1.5}) {
      const double d = frac * sigma * sigma;
      const double p = 4.0 * sigma * sigma;
      const double expected = std::max(0.5 * std::log2(sigma * sigma / d), 0.0);
      shannon_bad += std::abs(rdp::rdp_gaussian(src, d, p) - expected) > 1e-12;
    }
  }
  const double half = rdp::rdp_gaussian(rdp::GaussianSource{1.0}, 0.5, 1.0);
  const double t = seconds_since(start);
  return {max_jump <= 1e-9 && mono == 0 && shannon_bad == 0 && std::abs(half - 0.5) < 1e-12 &&
              t < 5.0,
          "max branch jump " + fmt(max_jump) + ", monotonicity violations " +
              std::to_string(mono) + ", R(1, 0.5, 1) = " + fmt(half, 12) + " bits, " +
              fmt(t, 3) + " s"};
}

double mean_psnr(const std::vector<Image>& a, const std::vector<Image>& b) {
  return metrics::batch_fidelity(a, b).psnr_mean;
}

// 7. Purification fidelity. Uses CIFAR-10 when UPURE_CIFAR10_BIN names a
// batch file, otherwise the closed-form check on synthetic images.
Outcome purification_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  const char* cifar = std::getenv("UPURE_CIFAR10_BIN");
  if (cifar != nullptr && fs::exists(cifar)) {
    io::Dataset ds = io::load_dataset(cifar);
    if (ds.images.size() > 1000) ds.images.resize(1000);
    if (ds.images.size() < 1000) return {false, "need at least 1000 CIFAR-10 images"};
    const auto cal = cli::calibrate_sigma(ds.images, 16, 45.43, 0, 1);
    purify::PurifyConfig cfg;
    cfg.tau = 16;
    cfg.sigma = cal.sigma;
    const auto perturbed = purify::purify_dataset(ds.images, cfg, {});
    cfg.strategy = purify::Strategy::kTurnToZero;
    const auto zeroed = purify::purify_dataset(ds.images, cfg, {});
    cfg.strategy = purify::Strategy::kReplaceFromOther;
    const auto replaced = purify::purify_dataset(ds.images, cfg, ds.images);
    const auto rp = metrics::batch_fidelity(ds.images, perturbed);
    const double pz = mean_psnr(ds.images, zeroed);
    const double pr = mean_psnr(ds.images, replaced);
    const double t = seconds_since(start);
    return {rp.psnr_mean >= 43 && rp.psnr_mean <= 48 && rp.ssim_mean >= 0.99 && pz >= 30 &&
                pz <= 36 && pr < pz && t < 120.0,
            "CIFAR-10: sigma " + fmt(cal.sigma) + ", perturb PSNR/SSIM " + fmt(rp.psnr_mean) +
                "/" + fmt(rp.ssim_mean) + ", zero PSNR " + fmt(pz) + ", replace PSNR " +
                fmt(pr) + ", " + fmt(t, 3) + " s"};
  }
  std::vector<Image> images;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    images.push_back(random_image(Shape{32, 32, 3}, 5000 + i, 40.0, 215.0));
  }
  const auto cal = cli::calibrate_sigma(images, 16, 45.43, 0, 1);
  const double predicted =
      10.0 * std::log10(255.0 * 255.0 * 32.0 * 32.0 / (cal.sigma * cal.sigma * 16.0 * 16.0));
  const double measured = cal.psnr;
  const double t = seconds_since(start);
  return {std::abs(measured - predicted) <= 0.5 && t < 120.0,
          "CIFAR-10 unavailable, synthetic fallback: sigma " + fmt(cal.sigma) +
              ", measured PSNR " + fmt(measured) + " dB, closed form " + fmt(predicted) +
              " dB, " + fmt(t, 3) + " s"};
}

// Fraction of a delta image's energy in the bottom-right tau x tau block,
// computed with the textbook double sum.
double direct_region_fraction(const Image& delta, int tau) {
  const int h = delta.height();
  const int w = delta.width();
  double region = 0.0;
  double total = 0.0;
  for (int ch = 0; ch < delta.channels(); ++ch) {
    for (int u = 0; u < h; ++u) {
      for (int v = 0; v < w; ++v) {
        double acc = 0.0;
        for (int r = 0; r < h; ++r) {
          for (int c = 0; c < w; ++c) {
            acc += delta.at(ch, r, c) * std::cos(std::numbers::pi * (2 * r + 1) * u / (2.0 * h)) *
                   std::cos(std::numbers::pi * (2 * c + 1) * v / (2.0 * w));
          }
        }
        const double coeff = acc * (u ? std::sqrt(2.0 / h) : std::sqrt(1.0 / h)) *
                             (v ? std::sqrt(2.0 / w) : std::sqrt(1.0 / w));
        total += coeff * coeff;
        if (u >= h - tau && v >= w - tau) region += coeff * coeff;
      }
    }
  }
  return region / total;
}

// 8. Where the two trigger families put their energy.
Outcome trigger_spectrum() {
  const Shape shape{32, 32, 3};
  const Image grid = trigger::grid_delta(shape, trigger::RepetitiveTriggerSpec{});
  Image patch(shape, 0.0);
  for (int ch = 0; ch < 3; ++ch) {
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) patch.at(ch, r, c) = 255.0;
    }
  }
  const double grid_direct = direct_region_fraction(grid, 16);
  const double patch_direct = direct_region_fraction(patch, 16);
  const double grid_lib = spectral::region_energy(spectral::dct2(grid), 16);
  const double patch_lib = spectral::region_energy(spectral::dct2(patch), 16);
  const bool agree = std::abs(grid_direct - grid_lib) < 1e-9 && std::abs(patch_direct - patch_lib) < 1e-9;
  return {agree && grid_direct >= 0.5 && patch_direct < 0.5,
          "default grid region fraction " + fmt(grid_direct) + " (need >= 0.5), 4x4 patch " +
              fmt(patch_direct) + " (need < 0.5), library agrees with direct sum: " +
              (agree ? "yes" : "no")};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. CLI poison + purify reruns are byte-identical across worker counts.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "upure_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::Dataset ds;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Image img = random_image(Shape{32, 32, 3}, 9000 + i, 0.0, 255.0);
    for (double& v : img.values()) v = std::round(v);
    ds.images.push_back(std::move(img));
    ds.labels.push_back(static_cast<int>(i % 10));
  }
  const fs::path input = dir / "clean.bin";
  io::save_dataset(ds, input, io::Format::kCifar10);

  std::set<std::string> digests;
  int runs = 0;
  int failures = 0;
  for (int rep = 0; rep < 3; ++rep) {
    for (int workers : {1, 2, 4}) {
      // Same paths every run: the sidecars echo the input path.
      const std::string poisoned = (dir / "poisoned.bin").string();
      const std::string purified = (dir / "purified.bin").string();
      for (const auto& f : {poisoned, poisoned + ".mask.txt", poisoned + ".config.txt", purified,
                            purified + ".config.txt"}) {
        fs::remove(f);
      }
      std::ostringstream out;
      std::ostringstream err;
      failures += cli::run({"poison", "--input", input.string(), "--output", poisoned, "--gamma",
                            "0.1", "--trigger", "patch", "--patch-position", "random", "--seed",
                            "17", "--workers", std::to_string(workers)},
                           out, err) != 0;
      failures += cli::run({"purify", "--input", poisoned, "--output", purified, "--seed", "17",
                            "--workers", std::to_string(workers)},
                           out, err) != 0;
      digests.insert(slurp(poisoned) + slurp(poisoned + ".mask.txt") +
                     slurp(poisoned + ".config.txt") + slurp(purified) +
                     slurp(purified + ".config.txt"));
      ++runs;
    }
  }
  fs::remove_all(dir);
  return {failures == 0 && digests.size() == 1,
          std::to_string(runs) + " runs (3 repetitions x workers 1/2/4), " +
              std::to_string(digests.size()) + " distinct output sets, " +
              std::to_string(failures) + " command failures"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_unattainable;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-unattainable") known_unattainable.insert(std::atoi(argv[++i]));
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"transform fidelity", transform_fidelity},
      {"single-trigger lattice count exactness", lattice_exactness},
      {"single-trigger bound holds at random positions", lattice_bound_property},
      {"repetitive-trigger bound exactness and dominance", repet_exactness},
      {"combined defense bound", defense_product},
      {"rate-distortion-perception function", rdp_properties},
      {"purification fidelity", purification_fidelity},
      {"trigger spectral concentration", trigger_spectrum},
      {"pipeline determinism", determinism},
  };

  int unexpected = 0;
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected_fail = known_unattainable.count(id) > 0;
    std::string note;
    if (expected_fail) note = o.pass ? " [listed unattainable but passed]" : " [known unattainable]";
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - "
              << criteria[i].first << ": " << o.detail << note << std::endl;
    passed += o.pass;
    unexpected += o.pass == expected_fail;
  }
  std::cout << "criterion 10: EXCLUDED - training-based results, FID and the unstated-normalization "
               "rate table are out of scope"
            << std::endl;
  std::cout << passed << "/" << criteria.size() << " criteria passed, " << unexpected
            << " unexpected outcome(s)" << std::endl;
  return unexpected == 0 ? 0 : 1;
}
