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

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "upure/table.hpp"

namespace upure::bounds {

// Failure probability of a single rectangular trigger under a random cutout.
//
// The cutout (cut_height x cut_width) is placed uniformly at one of the
// (H - Hc + 1)(W - Wc + 1) positions inside the image; the trigger fails when
// the two rectangles overlap in at least `alpha` pixels.
struct SingleTriggerParams {
  int height = 32;
  int width = 32;
  int cut_height = 16;
  int cut_width = 16;
  int trig_height = 4;
  int trig_width = 4;
  std::int64_t alpha = 16;
};

// Requires H > Hc >= Ht >= 1, W > Wc >= Wt >= 1 and alpha >= 1. An alpha
// above Ht * Wt is accepted and simply yields probability 0.
void validate(const SingleTriggerParams& p);

// Ht - alpha / (Wt - w): the largest vertical offset h (as a real number)
// at which a cutout shifted w columns still covers alpha trigger pixels.
// Throws std::invalid_argument unless 0 <= w < Wt.
double phi(int w, const SingleTriggerParams& p);

// Number of integer offsets (w, h) >= 0 with (Wt - w)(Ht - h) >= alpha:
// sum over w = 0 .. floor(Wt - alpha / Ht) of floor(phi(w)) + 1, negative
// terms contributing nothing. Evaluated in exact integer arithmetic.
std::int64_t lattice_count(const SingleTriggerParams& p);

// lattice_count / ((H - Hc + 1)(W - Wc + 1)).
double p_single_lower(const SingleTriggerParams& p);

struct Rect {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
};

std::int64_t overlap_area(const Rect& a, const Rect& b);

// Enumerates every cutout placement against a trigger at (row, col) and
// returns the number with overlap >= alpha.
std::int64_t count_failing_placements(const SingleTriggerParams& p, int trig_row, int trig_col);

// count_failing_placements at the (0, 0) corner over the number of
// placements; the quantity p_single_lower must reproduce exactly.
double p_single_exact_corner(const SingleTriggerParams& p);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
};

// Draws `trials` uniform cutout placements. Trials are split into fixed
// chunks with their own streams, so the result ignores `workers`.
Estimate p_single_monte_carlo(const SingleTriggerParams& p, int trig_row, int trig_col,
                              std::int64_t trials, std::uint64_t seed, int workers = 1);

// Failure probability of a repetitive trigger whose high-frequency
// coefficients (zig-zag ranks M+1 .. N-1) each change independently.
struct RepetTriggerParams {
  int total = 16;      // N, coefficient count
  int preserved = 4;   // M, low-frequency threshold
  int beta = 6;        // coefficients that must change
  // One probability shared by every coefficient, or one per coefficient
  // (length N - M - 1).
  std::variant<double, std::vector<double>> q = 0.5;

  int changeable() const { return total - preserved - 1; }
};

void validate(const RepetTriggerParams& p);

// P[at least beta of the N - M - 1 coefficients change]. Scalar q sums the
// binomial tail term by term; vector q uses the Poisson-binomial DP.
double p_repet_lower(const RepetTriggerParams& p);

// Distribution of the number of successes among independent Bernoulli(q_k).
std::vector<double> poisson_binomial_pmf(std::span<const double> q);

// Tail P[X >= beta] of the Poisson-binomial with the given probabilities.
double poisson_binomial_tail(std::span<const double> q, int beta);

Estimate p_repet_monte_carlo(const RepetTriggerParams& p, std::int64_t trials, std::uint64_t seed,
                             int workers = 1);

// Product of the two lower bounds.
double p_defense(const SingleTriggerParams& sp, const RepetTriggerParams& rp);

struct SingleSweepGrid {
  int height = 32;
  int width = 32;
  std::vector<int> cut_sizes{8, 12, 16};
  std::vector<int> trig_sizes{2, 4, 6, 8};
  std::vector<std::int64_t> alphas{1, 4, 8, 16, 32};
};

// Square cutouts and triggers from the grid; combinations violating
// Hc >= Ht or alpha <= Ht * Wt are skipped. Columns: H, W, H_c, W_c, H_t,
// W_t, alpha, lattice_count, p_single_lower.
Table sweep_single(const SingleSweepGrid& grid);

struct RepetSweepGrid {
  int total = 16;
  std::vector<int> preserved{2, 4};
  std::vector<double> q{0.2, 0.5, 0.8};
};

// One row per (M, q, beta) with beta = 1 .. N - M - 1. Columns: N, M, q,
// beta, p_repet_lower.
Table sweep_repet(const RepetSweepGrid& grid);

}  // namespace upure::bounds
