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

#include <bit>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace upure::bounds {
namespace {

// Counts covered trigger pixels one by one instead of intersecting rectangles.
std::int64_t pixel_overlap(int tr, int tc, int th, int tw, int cr, int cc, int ch, int cw) {
  std::int64_t n = 0;
  for (int r = tr; r < tr + th; ++r) {
    for (int c = tc; c < tc + tw; ++c) n += r >= cr && r < cr + ch && c >= cc && c < cc + cw;
  }
  return n;
}

std::int64_t oracle_failing(const SingleTriggerParams& p, int tr, int tc) {
  std::int64_t n = 0;
  for (int r = 0; r <= p.height - p.cut_height; ++r) {
    for (int c = 0; c <= p.width - p.cut_width; ++c) {
      n += pixel_overlap(tr, tc, p.trig_height, p.trig_width, r, c, p.cut_height, p.cut_width) >=
           p.alpha;
    }
  }
  return n;
}

// Sums P over every subset of changed coefficients.
double subset_tail(const std::vector<double>& q, int beta) {
  const std::size_t n = q.size();
  double tail = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) < beta) continue;
    double prob = 1.0;
    for (std::size_t k = 0; k < n; ++k) prob *= (mask >> k) & 1u ? q[k] : 1.0 - q[k];
    tail += prob;
  }
  return tail;
}

TEST(PhiTest, Values) {
  SingleTriggerParams p;
  p.trig_height = 8;
  p.trig_width = 8;
  p.alpha = 16;
  EXPECT_DOUBLE_EQ(phi(0, p), 6.0);
  EXPECT_DOUBLE_EQ(phi(4, p), 4.0);
  EXPECT_DOUBLE_EQ(phi(7, p), -8.0);
  EXPECT_THROW(phi(8, p), std::invalid_argument);
  EXPECT_THROW(phi(-1, p), std::invalid_argument);
}

TEST(LatticeCountTest, WorkedCase) {
  SingleTriggerParams p;
  p.trig_height = 8;
  p.trig_width = 8;
  p.alpha = 16;
  EXPECT_EQ(lattice_count(p), 33);
  EXPECT_DOUBLE_EQ(p_single_lower(p), 33.0 / 289.0);
}

TEST(LatticeCountTest, SmallCases) {
  SingleTriggerParams p;
  p.trig_height = 4;
  p.trig_width = 4;
  p.alpha = 16;
  EXPECT_EQ(lattice_count(p), 1);
  p.alpha = 17;
  EXPECT_EQ(lattice_count(p), 0);
  EXPECT_EQ(p_single_lower(p), 0.0);
  p.alpha = 1;
  EXPECT_EQ(lattice_count(p), 16);
}

TEST(LatticeCountTest, MatchesPixelOracleAtCorner) {
  for (int ht = 1; ht <= 6; ++ht) {
    for (int wt = 1; wt <= 6; ++wt) {
      for (std::int64_t alpha = 1; alpha <= ht * wt; ++alpha) {
        const SingleTriggerParams p{20, 24, 10, 12, ht, wt, alpha};
        EXPECT_EQ(lattice_count(p), oracle_failing(p, 0, 0)) << ht << " " << wt << " " << alpha;
        EXPECT_EQ(count_failing_placements(p, 0, 0), oracle_failing(p, 0, 0));
      }
    }
  }
}

TEST(LatticeCountTest, CornerIsTheWorstPosition) {
  const SingleTriggerParams p{16, 16, 8, 8, 3, 4, 6};
  const std::int64_t corner = lattice_count(p);
  for (int r = 0; r + p.trig_height <= p.height; ++r) {
    for (int c = 0; c + p.trig_width <= p.width; ++c) {
      EXPECT_GE(count_failing_placements(p, r, c), corner);
      EXPECT_EQ(count_failing_placements(p, r, c), oracle_failing(p, r, c));
    }
  }
}

TEST(LatticeCountTest, NonIncreasingInAlpha) {
  std::int64_t prev = lattice_count(SingleTriggerParams{32, 32, 16, 16, 6, 5, 1});
  for (std::int64_t a = 2; a <= 31; ++a) {
    const std::int64_t cur = lattice_count(SingleTriggerParams{32, 32, 16, 16, 6, 5, a});
    EXPECT_LE(cur, prev);
    prev = cur;
  }
}

TEST(SingleValidateTest, Rejects) {
  EXPECT_THROW(validate(SingleTriggerParams{32, 32, 32, 16, 4, 4, 1}), std::invalid_argument);
  EXPECT_THROW(validate(SingleTriggerParams{32, 32, 4, 16, 8, 4, 1}), std::invalid_argument);
  EXPECT_THROW(validate(SingleTriggerParams{32, 32, 16, 16, 4, 4, 0}), std::invalid_argument);
  EXPECT_THROW(validate(SingleTriggerParams{32, 32, 16, 16, 0, 4, 1}), std::invalid_argument);
  EXPECT_NO_THROW(validate(SingleTriggerParams{32, 32, 16, 16, 4, 4, 100}));
}

TEST(OverlapTest, Rectangles) {
  EXPECT_EQ(overlap_area(Rect{0, 0, 4, 4}, Rect{2, 2, 4, 4}), 4);
  EXPECT_EQ(overlap_area(Rect{0, 0, 4, 4}, Rect{4, 0, 4, 4}), 0);
  EXPECT_EQ(overlap_area(Rect{1, 1, 2, 2}, Rect{0, 0, 8, 8}), 4);
}

TEST(SingleMonteCarloTest, AgreesWithExactCountAndIgnoresWorkers) {
  const SingleTriggerParams p{32, 32, 16, 16, 8, 8, 16};
  const double exact = static_cast<double>(count_failing_placements(p, 5, 9)) / 289.0;
  const Estimate one = p_single_monte_carlo(p, 5, 9, 300000, 7, 1);
  EXPECT_NEAR(one.value, exact, 4.0 * one.std_error);
  EXPECT_EQ(one.trials, 300000);
  const Estimate many = p_single_monte_carlo(p, 5, 9, 300000, 7, 3);
  EXPECT_EQ(one.hits, many.hits);
  EXPECT_THROW(p_single_monte_carlo(p, 30, 0, 10, 0), std::invalid_argument);
  EXPECT_THROW(p_single_monte_carlo(p, 0, 0, 0, 0), std::invalid_argument);
}

TEST(RepetTest, WorkedValues) {
  RepetTriggerParams p;
  EXPECT_EQ(p.changeable(), 11);
  p.beta = 6;
  p.q = 0.5;
  EXPECT_NEAR(p_repet_lower(p), 0.5, 1e-14);
  p.beta = 1;
  EXPECT_NEAR(p_repet_lower(p), 1.0 - std::pow(0.5, 11), 1e-14);
  p.beta = 11;
  EXPECT_NEAR(p_repet_lower(p), std::pow(0.5, 11), 1e-18);
  p.q = 0.0;
  EXPECT_EQ(p_repet_lower(p), 0.0);
  p.q = 1.0;
  EXPECT_EQ(p_repet_lower(p), 1.0);
}

TEST(RepetTest, ScalarMatchesSubsetOracle) {
  for (int m : {2, 4, 8}) {
    for (double q : {0.05, 0.2, 0.5, 0.8, 0.97}) {
      RepetTriggerParams p;
      p.preserved = m;
      p.q = q;
      const std::vector<double> qs(static_cast<std::size_t>(p.changeable()), q);
      for (int beta = 1; beta <= p.changeable(); ++beta) {
        p.beta = beta;
        EXPECT_NEAR(p_repet_lower(p), subset_tail(qs, beta), 1e-12);
      }
    }
  }
}

TEST(RepetTest, VectorMatchesSubsetOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RepetTriggerParams p;
    p.preserved = 3;
    std::vector<double> qs(static_cast<std::size_t>(p.changeable()));
    for (double& q : qs) q = u(rng);
    p.q = qs;
    for (int beta = 1; beta <= p.changeable(); ++beta) {
      p.beta = beta;
      EXPECT_NEAR(p_repet_lower(p), subset_tail(qs, beta), 1e-12);
    }
  }
}

TEST(RepetTest, PmfSumsToOne) {
  const std::vector<double> q{0.1, 0.9, 0.3, 0.3, 0.75};
  const auto pmf = poisson_binomial_pmf(q);
  ASSERT_EQ(pmf.size(), 6u);
  double total = 0.0;
  for (double v : pmf) total += v;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_NEAR(pmf[0], 0.9 * 0.1 * 0.7 * 0.7 * 0.25, 1e-15);
  EXPECT_EQ(poisson_binomial_tail(q, 0), 1.0);
  EXPECT_EQ(poisson_binomial_tail(q, 6), 0.0);
}

TEST(RepetTest, Validation) {
  RepetTriggerParams p;
  p.beta = 12;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.beta = 0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.beta = 3;
  p.q = 1.5;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.q = std::vector<double>{0.5, 0.5};
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.q = 0.5;
  p.preserved = 15;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(RepetMonteCarloTest, WithinThreeStandardErrors) {
  RepetTriggerParams p;
  p.preserved = 2;
  p.beta = 9;
  p.q = 0.6;
  const Estimate e = p_repet_monte_carlo(p, 200000, 5, 2);
  EXPECT_NEAR(e.value, p_repet_lower(p), 3.0 * e.std_error);
  EXPECT_EQ(e.hits, p_repet_monte_carlo(p, 200000, 5, 1).hits);
}

TEST(DefenseTest, IsTheProduct) {
  const SingleTriggerParams sp{32, 32, 16, 16, 8, 8, 16};
  RepetTriggerParams rp;
  EXPECT_EQ(p_defense(sp, rp), p_single_lower(sp) * p_repet_lower(rp));
  EXPECT_NEAR(p_defense(sp, rp), 33.0 / 289.0 * 0.5, 1e-14);
}

TEST(SweepTest, SingleGridRows) {
  const Table t = sweep_single(SingleSweepGrid{});
  ASSERT_EQ(t.columns.size(), 9u);
  std::size_t expected = 0;
  for (int cut : {8, 12, 16}) {
    for (int trig : {2, 4, 6, 8}) {
      if (trig > cut) continue;
      for (int alpha : {1, 4, 8, 16, 32}) expected += alpha <= trig * trig;
    }
  }
  EXPECT_EQ(t.rows.size(), expected);
  for (const auto& row : t.rows) {
    const double p = std::get<double>(row[8]);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(SweepTest, RepetGridRows) {
  const Table t = sweep_repet(RepetSweepGrid{});
  EXPECT_EQ(t.rows.size(), 3u * 13u + 3u * 11u);
  EXPECT_EQ(t.columns.back(), "p_repet_lower");
}

TEST(LatticeCountTest, ExactCornerMatchesOnFullGrid) {
  for (int ht = 2; ht <= 8; ++ht) {
    for (int wt = 2; wt <= 8; ++wt) {
      for (std::int64_t alpha = 1; alpha <= ht * wt; ++alpha) {
        const SingleTriggerParams p{32, 32, 16, 16, ht, wt, alpha};
        EXPECT_EQ(p_single_lower(p), p_single_exact_corner(p));
      }
    }
  }
  EXPECT_DOUBLE_EQ(p_single_lower(SingleTriggerParams{32, 32, 16, 16, 1, 1, 1}), 1.0 / 289.0);
  EXPECT_DOUBLE_EQ(p_single_lower(SingleTriggerParams{32, 32, 16, 16, 4, 4, 16}), 1.0 / 289.0);
  EXPECT_EQ(p_single_exact_corner(SingleTriggerParams{32, 32, 16, 16, 4, 4, 17}), 0.0);
}

TEST(LatticeCountTest, NonDecreasingInCutoutSize) {
  for (std::int64_t alpha : {1, 6, 12, 24}) {
    double prev = 0.0;
    for (int cut = 6; cut <= 20; ++cut) {
      const SingleTriggerParams p{32, 32, cut, 16, 6, 5, alpha};
      // The count is fixed once the cutout covers the trigger, and the
      // number of placements shrinks as the cutout grows.
      const double v = p_single_lower(p);
      EXPECT_GE(v, prev - 1e-15) << cut << " " << alpha;
      prev = v;
    }
    prev = 0.0;
    for (int cut = 5; cut <= 20; ++cut) {
      const double v = p_single_lower(SingleTriggerParams{32, 32, 16, cut, 6, 5, alpha});
      EXPECT_GE(v, prev - 1e-15);
      prev = v;
    }
  }
}

TEST(SingleMonteCarloTest, CornerAndCentreAndUnreachableAlpha) {
  const SingleTriggerParams p{32, 32, 16, 16, 8, 8, 16};
  const Estimate corner = p_single_monte_carlo(p, 0, 0, 1000000, 21);
  EXPECT_NEAR(corner.value, p_single_exact_corner(p), 3.0 * corner.std_error);
  const Estimate centre = p_single_monte_carlo(p, 12, 12, 200000, 22);
  EXPECT_GE(centre.value, p_single_lower(p));
  EXPECT_EQ(p_single_monte_carlo(SingleTriggerParams{32, 32, 16, 16, 4, 4, 17}, 3, 3, 10000, 1).hits,
            0);
}

TEST(RepetTest, SpecValues) {
  RepetTriggerParams p;
  p.preserved = 2;
  p.q = 0.2;
  p.beta = 3;
  EXPECT_NEAR(p_repet_lower(p), 0.498, 5e-4);
  p.q = 1.0;
  for (int beta = 1; beta <= p.changeable(); ++beta) {
    p.beta = beta;
    EXPECT_EQ(p_repet_lower(p), 1.0);
  }
  p.q = 0.0;
  EXPECT_EQ(p_repet_monte_carlo(p, 1000, 1).hits, 0);
  p.q = 1.0;
  p.beta = p.changeable();
  EXPECT_EQ(p_repet_monte_carlo(p, 1000, 1).hits, 1000);
}

TEST(RepetTest, MonotoneInEachProbabilityAndInM) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    RepetTriggerParams p;
    std::vector<double> qs(static_cast<std::size_t>(p.changeable()));
    for (double& q : qs) q = u(rng);
    for (int beta = 1; beta <= p.changeable(); ++beta) {
      p.beta = beta;
      p.q = qs;
      const double base = p_repet_lower(p);
      for (std::size_t k = 0; k < qs.size(); ++k) {
        auto bumped = qs;
        bumped[k] = std::min(1.0, bumped[k] + 0.1);
        p.q = bumped;
        EXPECT_GE(p_repet_lower(p), base - 1e-15);
      }
    }
  }
  for (double q : {0.2, 0.5, 0.8}) {
    for (int beta = 1; beta <= 5; ++beta) {
      double prev = 1.0;
      for (int m = 0; m <= 14 - beta; ++m) {
        RepetTriggerParams p;
        p.preserved = m;
        p.beta = beta;
        p.q = q;
        const double v = p_repet_lower(p);
        EXPECT_LE(v, prev + 1e-15);
        prev = v;
      }
    }
  }
}

TEST(DefenseTest, ZeroFactorAndBounds) {
  RepetTriggerParams rp;
  rp.q = 0.0;
  EXPECT_EQ(p_defense(SingleTriggerParams{}, rp), 0.0);
  rp.q = 0.5;
  EXPECT_EQ(p_defense(SingleTriggerParams{32, 32, 16, 16, 4, 4, 17}, rp), 0.0);
  const SingleTriggerParams sp{32, 32, 16, 16, 8, 8, 16};
  EXPECT_NEAR(p_defense(sp, rp), 0.0571, 1e-4);
  EXPECT_LE(p_defense(sp, rp), std::min(p_single_lower(sp), p_repet_lower(rp)));
}

TEST(SweepTest, RepetRowsNonIncreasingInBeta) {
  const Table t = sweep_repet(RepetSweepGrid{});
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double beta = std::get<double>(t.rows[i][3]);
    const double v = std::get<double>(t.rows[i][4]);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (beta > 1.0) {
      EXPECT_LE(v, std::get<double>(t.rows[i - 1][4]));
    }
  }
  bool has_m4_beta11 = false;
  for (const auto& row : t.rows) {
    has_m4_beta11 |= std::get<double>(row[1]) == 4.0 && std::get<double>(row[3]) == 11.0;
  }
  EXPECT_TRUE(has_m4_beta11);
}

TEST(PhiTest, FullAreaAlpha) {
  const SingleTriggerParams p{32, 32, 16, 16, 8, 8, 64};
  EXPECT_DOUBLE_EQ(phi(0, p), 0.0);
}

}  // namespace
}  // namespace upure::bounds
