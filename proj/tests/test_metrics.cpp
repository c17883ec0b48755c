// Copyright 2026 The tiltsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tiltsearch/metrics.hpp"

namespace tiltsearch {
namespace {

using oracle::Mat;
using oracle::Vec;

TrialResult Row(Strategy s, int n, int b, double psnr) {
  TrialResult r;
  r.strategy = s;
  r.particles = n;
  r.base = b;
  r.psnr = psnr;
  return r;
}

TEST(Psnr, ExactReconstructionIsCapped) {
  const Vector x = Vec({1, 2});
  EXPECT_EQ(Psnr(x, x, 3.0), 100.0);
  EXPECT_EQ(Psnr(x, x, 3.0, 60.0), 60.0);
}

TEST(Psnr, MseEqualToPeakSquaredIsZero) {
  EXPECT_NEAR(Psnr(Vec({2, 2}), Vec({0, 0}), 2.0), 0.0, 1e-14);
}

TEST(Psnr, TwentyDecibels) {
  EXPECT_NEAR(Psnr(Vec({1.1, -0.9}), Vec({1.0, -1.0}), 1.0), 20.0, 1e-12);
}

TEST(Psnr, Errors) {
  EXPECT_THROW(Psnr(Vec({1}), Vec({1, 2}), 1.0), std::invalid_argument);
  EXPECT_THROW(Psnr(Vec({1}), Vec({2}), 0.0), std::invalid_argument);
}

TEST(PsnrProperty, InvariantUnderCoordinatePermutation) {
  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 6;
    Vector a = rng.StandardNormal(d), b = rng.StandardNormal(d);
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Vector pa(d), pb(d);
    for (int k = 0; k < d; ++k) {
      pa[k] = a[perm[k]];
      pb[k] = b[perm[k]];
    }
    EXPECT_NEAR(Psnr(a, b, 2.5), Psnr(pa, pb, 2.5), 1e-12);
  }
}

TEST(PeakFromPrior, MeanNormPlusThreeSigma) {
  const GaussianMixture prior({0.5, 0.5}, {Vec({3, 4}), Vec({1, 0})},
                              {Mat(2, 2, {0.04, 0, 0, 0.01}), Mat(2, 2, {0.25, 0, 0, 0.09})});
  EXPECT_NEAR(PeakFromPrior(prior), 5.0 + 3.0 * 0.5, 1e-12);
}

TEST(Aggregate, SingleAndEqualResults) {
  auto rows = Aggregate({Row(Strategy::kGreedySearch, 8, 4, 12.5)}, {GroupKey::kStrategy});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean, 12.5);
  EXPECT_EQ(rows[0].stddev, 0.0);
  EXPECT_EQ(rows[0].count, 1u);
  rows = Aggregate({Row(Strategy::kGreedySearch, 8, 4, 3.0), Row(Strategy::kGreedySearch, 8, 4, 3.0)},
                   {GroupKey::kBase});
  EXPECT_EQ(rows[0].stddev, 0.0);
  EXPECT_EQ(rows[0].base, 4);
  EXPECT_FALSE(rows[0].strategy.has_value());
}

TEST(Aggregate, EmptyInputIsAnError) {
  EXPECT_THROW(Aggregate({}, {GroupKey::kStrategy}), std::invalid_argument);
}

TEST(Aggregate, SkipsFailedRowsAndOrdersByKey) {
  std::vector<TrialResult> in = {Row(Strategy::kRecursiveForkJoin, 8, 4, 1.0),
                                 Row(Strategy::kGreedySearch, 8, 16, 2.0),
                                 Row(Strategy::kGreedySearch, 8, 2, 3.0),
                                 Row(Strategy::kGreedySearch, 8, 2, std::nan(""))};
  in.back().error = "boom";
  const auto rows = Aggregate(in, {GroupKey::kStrategy, GroupKey::kBase});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(*rows[0].strategy, Strategy::kGreedySearch);
  EXPECT_EQ(*rows[0].base, 2);
  EXPECT_EQ(rows[0].count, 1u);
  EXPECT_EQ(*rows[1].base, 16);
  EXPECT_EQ(*rows[2].strategy, Strategy::kRecursiveForkJoin);
}

TEST(Aggregate, MatchesTwoPassExtendedPrecision) {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> nd(1e6, 3.0);
  std::vector<TrialResult> in;
  for (int i = 0; i < 10000; ++i) in.push_back(Row(Strategy::kBestOfN, 1, 1, nd(eng)));
  long double sum = 0.0L;
  for (const auto& r : in) sum += r.psnr;
  const long double mean = sum / in.size();
  long double ss = 0.0L;
  for (const auto& r : in) ss += (r.psnr - mean) * (r.psnr - mean);
  const double sd = std::sqrt(static_cast<double>(ss / (in.size() - 1)));
  const auto rows = Aggregate(in, {});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean / static_cast<double>(mean), 1.0, 1e-10);
  EXPECT_NEAR(rows[0].stddev / sd, 1.0, 1e-10);
  EXPECT_NEAR(rows[0].stderr_mean, sd / 100.0, 1e-10 * sd);
}

TEST(AggregateProperty, OrderInvariant) {
  std::mt19937_64 eng(4);
  std::normal_distribution<double> nd(20.0, 5.0);
  std::vector<TrialResult> in;
  for (int i = 0; i < 500; ++i) {
    in.push_back(Row(i % 2 ? Strategy::kGreedySearch : Strategy::kRecursiveForkJoin, 8, 1 << (i % 4), nd(eng)));
  }
  const auto ref = Aggregate(in, {GroupKey::kStrategy, GroupKey::kBase});
  for (int k = 0; k < 10; ++k) {
    std::shuffle(in.begin(), in.end(), eng);
    const auto rows = Aggregate(in, {GroupKey::kStrategy, GroupKey::kBase});
    ASSERT_EQ(rows.size(), ref.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].mean, ref[i].mean);
      EXPECT_EQ(rows[i].stddev, ref[i].stddev);
    }
  }
}

TEST(RunningStats, Welford) {
  RunningStats s;
  for (double v : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) s.Add(v);
  EXPECT_EQ(s.count(), 8u);
  EXPECT_DOUBLE_EQ(s.mean(), 5.0);
  EXPECT_NEAR(s.variance(), 32.0 / 7.0, 1e-14);
}

}  // namespace
}  // namespace tiltsearch
