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

#include "upure/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "upure/parallel.hpp"
#include "upure/rng.hpp"

namespace upure::bounds {
namespace {

constexpr std::int64_t kTrialsPerChunk = 1 << 16;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t placements(const SingleTriggerParams& p) {
  return static_cast<std::int64_t>(p.height - p.cut_height + 1) *
         static_cast<std::int64_t>(p.width - p.cut_width + 1);
}

// Runs `trials` Bernoulli experiments in fixed-size chunks, one stream per
// chunk, and aggregates the hit counts in chunk order.
template <typename Trial>
Estimate run_chunked(std::int64_t trials, std::uint64_t seed, int workers, Trial&& trial) {
  if (trials < 1) throw std::invalid_argument("Monte-Carlo needs at least one trial");
  const auto chunks = static_cast<std::size_t>(ceil_div(trials, kTrialsPerChunk));
  std::vector<std::int64_t> hits(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t chunk) {
    Rng rng = stream_for(seed, chunk);
    const std::int64_t begin = static_cast<std::int64_t>(chunk) * kTrialsPerChunk;
    const std::int64_t end = std::min(trials, begin + kTrialsPerChunk);
    std::int64_t local = 0;
    for (std::int64_t t = begin; t < end; ++t) local += trial(rng) ? 1 : 0;
    hits[chunk] = local;
  });
  Estimate est;
  est.trials = trials;
  est.hits = std::accumulate(hits.begin(), hits.end(), std::int64_t{0});
  est.value = static_cast<double>(est.hits) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(trials));
  return est;
}

std::vector<double> expand_q(const RepetTriggerParams& p) {
  if (const auto* scalar = std::get_if<double>(&p.q)) {
    return std::vector<double>(static_cast<std::size_t>(p.changeable()), *scalar);
  }
  return std::get<std::vector<double>>(p.q);
}

}  // namespace

void validate(const SingleTriggerParams& p) {
  if (p.trig_height < 1 || p.trig_width < 1) {
    throw std::invalid_argument("trigger dimensions must be positive");
  }
  if (!(p.height > p.cut_height && p.cut_height >= p.trig_height)) {
    throw std::invalid_argument("need H > H_c >= H_t, got H=" + std::to_string(p.height) +
                                " H_c=" + std::to_string(p.cut_height) +
                                " H_t=" + std::to_string(p.trig_height));
  }
  if (!(p.width > p.cut_width && p.cut_width >= p.trig_width)) {
    throw std::invalid_argument("need W > W_c >= W_t, got W=" + std::to_string(p.width) +
                                " W_c=" + std::to_string(p.cut_width) +
                                " W_t=" + std::to_string(p.trig_width));
  }
  if (p.alpha < 1) throw std::invalid_argument("alpha must be at least 1");
}

double phi(int w, const SingleTriggerParams& p) {
  if (w < 0 || w >= p.trig_width) {
    throw std::invalid_argument("phi(w) needs 0 <= w < W_t, got w=" + std::to_string(w));
  }
  return static_cast<double>(p.trig_height) -
         static_cast<double>(p.alpha) / static_cast<double>(p.trig_width - w);
}

std::int64_t lattice_count(const SingleTriggerParams& p) {
  validate(p);
  // floor(Wt - alpha/Ht) = Wt - ceil(alpha/Ht); w = Wt never occurs because
  // alpha >= 1.
  const std::int64_t last_w = p.trig_width - ceil_div(p.alpha, p.trig_height);
  std::int64_t count = 0;
  for (std::int64_t w = 0; w <= last_w; ++w) {
    // floor(phi(w)) + 1 = Ht - ceil(alpha / (Wt - w)) + 1
    const std::int64_t term = p.trig_height - ceil_div(p.alpha, p.trig_width - w) + 1;
    count += std::max<std::int64_t>(term, 0);
  }
  return count;
}

double p_single_lower(const SingleTriggerParams& p) {
  return static_cast<double>(lattice_count(p)) / static_cast<double>(placements(p));
}

std::int64_t overlap_area(const Rect& a, const Rect& b) {
  const int rows = std::min(a.row + a.height, b.row + b.height) - std::max(a.row, b.row);
  const int cols = std::min(a.col + a.width, b.col + b.width) - std::max(a.col, b.col);
  if (rows <= 0 || cols <= 0) return 0;
  return static_cast<std::int64_t>(rows) * cols;
}

std::int64_t count_failing_placements(const SingleTriggerParams& p, int trig_row, int trig_col) {
  validate(p);
  if (trig_row < 0 || trig_col < 0 || trig_row + p.trig_height > p.height ||
      trig_col + p.trig_width > p.width) {
    throw std::invalid_argument("trigger position lies outside the image");
  }
  const Rect trig{trig_row, trig_col, p.trig_height, p.trig_width};
  std::int64_t count = 0;
  for (int r = 0; r <= p.height - p.cut_height; ++r) {
    for (int c = 0; c <= p.width - p.cut_width; ++c) {
      if (overlap_area(trig, Rect{r, c, p.cut_height, p.cut_width}) >= p.alpha) ++count;
    }
  }
  return count;
}

double p_single_exact_corner(const SingleTriggerParams& p) {
  return static_cast<double>(count_failing_placements(p, 0, 0)) /
         static_cast<double>(placements(p));
}

Estimate p_single_monte_carlo(const SingleTriggerParams& p, int trig_row, int trig_col,
                              std::int64_t trials, std::uint64_t seed, int workers) {
  validate(p);
  if (trig_row < 0 || trig_col < 0 || trig_row + p.trig_height > p.height ||
      trig_col + p.trig_width > p.width) {
    throw std::invalid_argument("trigger position lies outside the image");
  }
  const Rect trig{trig_row, trig_col, p.trig_height, p.trig_width};
  return run_chunked(trials, seed, workers, [&](Rng& rng) {
    std::uniform_int_distribution<int> row(0, p.height - p.cut_height);
    std::uniform_int_distribution<int> col(0, p.width - p.cut_width);
    const Rect cut{row(rng), col(rng), p.cut_height, p.cut_width};
    return overlap_area(trig, cut) >= p.alpha;
  });
}

void validate(const RepetTriggerParams& p) {
  if (p.preserved < 0 || p.preserved + 1 > p.total - 1) {
    throw std::invalid_argument("need M >= 0 and M + 1 <= N - 1, got N=" +
                                std::to_string(p.total) + " M=" + std::to_string(p.preserved));
  }
  if (p.beta < 1 || p.beta > p.changeable()) {
    throw std::invalid_argument("beta must lie in [1, N - M - 1] = [1, " +
                                std::to_string(p.changeable()) + "], got " +
                                std::to_string(p.beta));
  }
  auto check = [](double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
  };
  if (const auto* scalar = std::get_if<double>(&p.q)) {
    check(*scalar);
  } else {
    const auto& vec = std::get<std::vector<double>>(p.q);
    if (vec.size() != static_cast<std::size_t>(p.changeable())) {
      throw std::invalid_argument("q has " + std::to_string(vec.size()) +
                                  " entries, expected N - M - 1 = " +
                                  std::to_string(p.changeable()));
    }
    std::for_each(vec.begin(), vec.end(), check);
  }
}

std::vector<double> poisson_binomial_pmf(std::span<const double> q) {
  std::vector<double> pmf(q.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (std::size_t j = k + 1; j > 0; --j) pmf[j] = pmf[j] * (1.0 - q[k]) + pmf[j - 1] * q[k];
    pmf[0] *= 1.0 - q[k];
  }
  return pmf;
}

double poisson_binomial_tail(std::span<const double> q, int beta) {
  const auto pmf = poisson_binomial_pmf(q);
  double tail = 0.0;
  for (std::size_t j = static_cast<std::size_t>(std::max(beta, 0)); j < pmf.size(); ++j) {
    tail += pmf[j];
  }
  return std::clamp(tail, 0.0, 1.0);
}

double p_repet_lower(const RepetTriggerParams& p) {
  validate(p);
  const auto* scalar = std::get_if<double>(&p.q);
  if (scalar == nullptr) {
    return poisson_binomial_tail(std::get<std::vector<double>>(p.q), p.beta);
  }
  const double q = *scalar;
  const int n = p.changeable();
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  // sum_{L=beta}^{n} C(n, L) q^L (1-q)^(n-L), each term in log space.
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double log_nfact = std::lgamma(n + 1.0);
  double tail = 0.0;
  for (int l = p.beta; l <= n; ++l) {
    const double log_term =
        log_nfact - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0) + l * log_q + (n - l) * log_1mq;
    tail += std::exp(log_term);
  }
  return std::clamp(tail, 0.0, 1.0);
}

Estimate p_repet_monte_carlo(const RepetTriggerParams& p, std::int64_t trials, std::uint64_t seed,
                             int workers) {
  validate(p);
  const auto q = expand_q(p);
  return run_chunked(trials, seed, workers, [&](Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int changed = 0;
    for (double qk : q) changed += u(rng) < qk ? 1 : 0;
    return changed >= p.beta;
  });
}

double p_defense(const SingleTriggerParams& sp, const RepetTriggerParams& rp) {
  return p_single_lower(sp) * p_repet_lower(rp);
}

Table sweep_single(const SingleSweepGrid& grid) {
  Table table;
  table.columns = {"H", "W", "H_c", "W_c", "H_t", "W_t", "alpha", "lattice_count",
                   "p_single_lower"};
  for (int cut : grid.cut_sizes) {
    for (int trig : grid.trig_sizes) {
      if (trig > cut) continue;
      for (std::int64_t alpha : grid.alphas) {
        if (alpha > static_cast<std::int64_t>(trig) * trig) continue;
        SingleTriggerParams p{grid.height, grid.width, cut, cut, trig, trig, alpha};
        const auto count = lattice_count(p);
        table.rows.push_back({double(p.height), double(p.width), double(cut), double(cut),
                              double(trig), double(trig), double(alpha), double(count),
                              p_single_lower(p)});
      }
    }
  }
  return table;
}

Table sweep_repet(const RepetSweepGrid& grid) {
  Table table;
  table.columns = {"N", "M", "q", "beta", "p_repet_lower"};
  for (int m : grid.preserved) {
    for (double q : grid.q) {
      RepetTriggerParams p;
      p.total = grid.total;
      p.preserved = m;
      p.q = q;
      for (int beta = 1; beta <= p.changeable(); ++beta) {
        p.beta = beta;
        table.rows.push_back(
            {double(grid.total), double(m), q, double(beta), p_repet_lower(p)});
      }
    }
  }
  return table;
}

}  // namespace upure::bounds
