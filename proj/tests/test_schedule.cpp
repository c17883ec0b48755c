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

#include <stdexcept>

#include <gtest/gtest.h>

#include "tiltsearch/random.hpp"
#include "tiltsearch/schedule.hpp"

namespace tiltsearch {
namespace {

TEST(Schedule, ConstantTwoStep) {
  const DiffusionSchedule s = DiffusionSchedule::Linear(2, 0.5, 0.5);
  EXPECT_EQ(s.steps(), 2);
  EXPECT_DOUBLE_EQ(s.beta(1), 0.5);
  EXPECT_DOUBLE_EQ(s.beta(2), 0.5);
  EXPECT_DOUBLE_EQ(s.alpha_bar(1), 0.5);
  EXPECT_DOUBLE_EQ(s.alpha_bar(2), 0.25);
}

TEST(Schedule, SingleStep) {
  const DiffusionSchedule s = DiffusionSchedule::Linear(1, 0.1, 0.1);
  ASSERT_EQ(s.alpha_bars().size(), 1u);
  EXPECT_DOUBLE_EQ(s.alpha_bars()[0], 0.9);
}

TEST(Schedule, AlphaBarZeroIsOne) {
  EXPECT_EQ(DiffusionSchedule::Linear(10, 1e-3, 0.1).alpha_bar(0), 1.0);
}

TEST(Schedule, LongScheduleMatchesExtendedPrecisionProduct) {
  const DiffusionSchedule s = DiffusionSchedule::Linear(256, 1e-4, 0.02);
  long double prod = 1.0L;
  for (int t = 1; t <= 256; ++t) {
    const long double beta = 1e-4L + (0.02L - 1e-4L) * (t - 1) / 255.0L;
    EXPECT_NEAR(s.beta(t), static_cast<double>(beta), 1e-15);
    prod *= 1.0L - beta;
  }
  EXPECT_NEAR(s.alpha_bar(256) / static_cast<double>(prod), 1.0, 1e-12);
}

TEST(Schedule, RejectsInvalidRanges) {
  EXPECT_THROW(DiffusionSchedule::Linear(0, 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(DiffusionSchedule::Linear(5, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(DiffusionSchedule::Linear(5, 0.2, 0.1), std::invalid_argument);
  EXPECT_THROW(DiffusionSchedule::Linear(5, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(DiffusionSchedule(std::vector<double>{0.1, 1.5}), std::invalid_argument);
}

TEST(Schedule, OutOfRangeSteps) {
  const DiffusionSchedule s = DiffusionSchedule::Linear(4, 0.1, 0.2);
  EXPECT_THROW(s.beta(0), std::out_of_range);
  EXPECT_THROW(s.beta(5), std::out_of_range);
  EXPECT_THROW(s.alpha_bar(-1), std::out_of_range);
  EXPECT_THROW(s.alpha_bar(5), std::out_of_range);
}

TEST(ScheduleProperty, RandomSchedulesAreConsistentAndDecreasing) {
  RandomStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int steps = 1 + static_cast<int>(rng.Uniform() * 400);
    const double lo = 1e-5 + 0.05 * rng.Uniform();
    const double hi = lo + (0.5 - lo) * rng.Uniform();
    const DiffusionSchedule s = DiffusionSchedule::Linear(steps, lo, hi);
    long double prod = 1.0L;
    for (int t = 1; t <= steps; ++t) {
      prod *= 1.0L - static_cast<long double>(s.beta(t));
      const double ab = s.alpha_bar(t);
      EXPECT_LT(ab, s.alpha_bar(t - 1));
      EXPECT_GT(ab, 0.0);
      EXPECT_LT(ab, 1.0);
      EXPECT_NEAR(ab / static_cast<double>(prod), 1.0, 1e-12);
      EXPECT_EQ(ab, s.alpha_bar(t - 1) * (1.0 - s.beta(t)));
    }
  }
}

}  // namespace
}  // namespace tiltsearch
