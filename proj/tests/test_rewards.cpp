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

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tiltsearch/rewards.hpp"

namespace tiltsearch {
namespace {

using oracle::Mat;
using oracle::Vec;

RewardSpec Linear(const Matrix& b, double tau = 1.0) { return {NegQuadraticLinear{b}, tau}; }

RewardSpec Cosine(const MlpNetwork& net, double tau = 1.0) { return {CosineMlp{net}, tau}; }

MlpNetwork Identity(int d) {
  return MlpNetwork({{Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)}});
}

TEST(Reward, LinearMaximumAtConsistentSide) {
  const Matrix b = Mat(1, 2, {0.6, 0.8});
  const Vector x = Vec({1.0, -2.0});
  EXPECT_EQ(Reward(Linear(b), x, b * x), 0.0);
  EXPECT_NEAR(Reward(Linear(b), x, b * x + Vec({0.5})), -0.25, 1e-15);
}

TEST(Reward, CosineParallelAndAntiparallel) {
  const RewardSpec spec = Cosine(Identity(2));
  EXPECT_NEAR(Reward(spec, Vec({1, 2}), Vec({2, 4})), 1.0, 1e-15);
  EXPECT_NEAR(Reward(spec, Vec({1, 2}), Vec({-3, -6})), -1.0, 1e-15);
  EXPECT_NEAR(Reward(spec, Vec({1, 0}), Vec({0, 5})), 0.0, 1e-15);
}

TEST(Reward, CosineZeroEmbeddingIsNeutral) {
  const RewardSpec spec = Cosine(Identity(2));
  EXPECT_EQ(Reward(spec, Vec({0, 0}), Vec({1, 1})), 0.0);
  EXPECT_EQ(Reward(spec, Vec({1, 1}), Vec({0, 0})), 0.0);
  EXPECT_EQ(RewardGradient(spec, Vec({0, 0}), Vec({1, 1})).norm(), 0.0);
}

TEST(RewardGradient, MatchesFiniteDifferences) {
  RandomStream rng(1);
  for (int i = 0; i < 50; ++i) {
    const RewardSpec spec = i % 2 ? Linear(Mat(2, 3, {rng.Normal(), rng.Normal(), rng.Normal(),
                                                      rng.Normal(), rng.Normal(), rng.Normal()}))
                                  : Cosine(MlpNetwork::Random(rng, 3, {16}, 4));
    const Vector s = rng.StandardNormal(i % 2 ? 2 : 4);
    const Vector x = rng.StandardNormal(3);
    const Eigen::VectorXd fd = oracle::Gradient([&](const Vector& p) { return Reward(spec, p, s); }, x);
    EXPECT_LT((RewardGradient(spec, x, s) - fd).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ValueHat, Arithmetic) {
  const Matrix b = Mat(1, 1, {1});
  EXPECT_EQ(ValueHat(Linear(b, 3.0), Vec({2}), Vec({2})), 0.0);
  EXPECT_NEAR(ValueHat(Linear(b, 1.0), Vec({0}), Vec({2})), -4.0, 1e-15);
  EXPECT_NEAR(ValueHat(Linear(b, 2.0), Vec({0}), Vec({2})), -2.0, 1e-15);
  EXPECT_THROW(ValueHat(Linear(b, 0.0), Vec({0}), Vec({2})), std::invalid_argument);
}

TEST(TiltWeights, UniformForEqualRewards) {
  const std::vector<double> w = TiltWeights(std::vector<double>(5, 3.3), 0.7);
  for (double v : w) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(TiltWeights, OneToThreeRatio) {
  for (double tau : {0.01, 1.0, 50.0}) {
    const std::vector<double> w = TiltWeights(std::vector<double>{0.0, tau * std::log(3.0)}, tau);
    EXPECT_NEAR(w[0], 0.25, 1e-12);
    EXPECT_NEAR(w[1], 0.75, 1e-12);
  }
}

TEST(TiltWeights, ZeroTemperatureLimitIsArgmax) {
  const std::vector<double> w = TiltWeights(std::vector<double>{0.1, 0.7, 0.3}, 1e-8);
  EXPECT_NEAR(w[1], 1.0, 1e-15);
  EXPECT_NEAR(w[0] + w[2], 0.0, 1e-15);
}

TEST(TiltWeights, Errors) {
  EXPECT_THROW(TiltWeights(std::vector<double>{}, 1.0), std::invalid_argument);
  EXPECT_THROW(TiltWeights(std::vector<double>{1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(TiltWeights(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(TiltWeights(std::vector<double>{1.0, std::numeric_limits<double>::infinity()}, 1.0),
               std::invalid_argument);
}

TEST(TiltWeightsProperty, ShiftInvarianceAndArgmax) {
  RandomStream rng(2);
  for (int i = 0; i < 200; ++i) {
    const int g = 1 + i % 9;
    const double tau = 0.05 + 3 * rng.Uniform();
    std::vector<double> r(g), shifted(g);
    const double c = 100 * rng.Normal();
    for (int k = 0; k < g; ++k) {
      r[k] = rng.Normal();
      shifted[k] = r[k] + c;
    }
    const std::vector<double> a = TiltWeights(r, tau), b = TiltWeights(shifted, tau);
    double sum = 0.0;
    for (int k = 0; k < g; ++k) {
      EXPECT_NEAR(a[k], b[k], 1e-12);
      EXPECT_GE(a[k], 0.0);
      sum += a[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(),
              std::max_element(r.begin(), r.end()) - r.begin());
  }
}

class ValueQuadrature : public ::testing::Test {
 protected:
  GaussianMixture prior_ = GaussianMixture::Single(Vec({0.4}), Mat(1, 1, {0.8}));
  DiffusionPrior dp_{prior_, DiffusionSchedule::Linear(40, 1e-3, 0.1)};
  LinearMeasurement meas_{Mat(1, 1, {0.7}), 0.5};
  Vector y_ = Vec({0.3});
};

TEST_F(ValueQuadrature, ConstantRewardGivesConstantOverTau) {
  // B = 0 makes r = -||s||^2 for every x.
  const RewardSpec spec = Linear(Mat(1, 1, {0.0}), 2.0);
  const double v = ValueExactQuadrature(dp_, 10, Vec({0.1}), spec, Vec({1.5}), meas_, y_);
  EXPECT_NEAR(v, -2.25 / 2.0, 1e-10);
}

TEST_F(ValueQuadrature, LargeTemperatureVanishes) {
  const RewardSpec spec = Linear(Mat(1, 1, {1.0}), 1e6);
  EXPECT_LT(std::abs(ValueExactQuadrature(dp_, 20, Vec({-0.4}), spec, Vec({1.0}), meas_, y_)), 1e-4);
}

TEST_F(ValueQuadrature, MatchesGaussianClosedForm) {
  // With a single Gaussian X ~ N(m, v) and r = -(s - b x)^2,
  // log E exp(r / tau) = -0.5 log(1 + 2 b^2 v / tau) - (s - b m)^2 / (tau + 2 b^2 v).
  const double b = 0.9, s = 1.2, tau = 0.7;
  const RewardSpec spec = Linear(Mat(1, 1, {b}), tau);
  for (int t : {1, 10, 30}) {
    const Vector xt = Vec({0.25});
    const GaussianMixture post =
        ExactPosterior(ConditionalPosterior(dp_, t, xt).AsMixture(), meas_.a, meas_.sigma_y, y_);
    const double m = post.mean(0)[0], v = post.covariance(0)(0, 0);
    const double expected =
        -0.5 * std::log(1 + 2 * b * b * v / tau) - (s - b * m) * (s - b * m) / (tau + 2 * b * b * v);
    EXPECT_NEAR(ValueExactQuadrature(dp_, t, xt, spec, Vec({s}), meas_, y_), expected, 1e-6);
  }
}

TEST_F(ValueQuadrature, LogExpectedTiltMatchesGridIn2d) {
  RandomStream rng(3);
  const GaussianMixture mix = oracle::RandomMixture(rng, 2, 2, 1.0);
  const RewardSpec spec = Cosine(MlpNetwork::Random(rng, 2, {8}, 3), 0.5);
  const Vector s = rng.StandardNormal(3);
  constexpr int kCells = 600;
  const double lo = -9, hi = 9, h = (hi - lo) / kCells;
  long double sum = 0.0L;
  for (int i = 0; i < kCells; ++i) {
    for (int j = 0; j < kCells; ++j) {
      const Vector x = Vec({lo + (i + 0.5) * h, lo + (j + 0.5) * h});
      sum += oracle::MixturePdf(mix, x) * std::exp(Reward(spec, x, s) / 0.5) * h * h;
    }
  }
  EXPECT_NEAR(LogExpectedTilt(mix, spec, s), static_cast<double>(std::log(sum)), 1e-5);
}

TEST_F(ValueQuadrature, RejectsHighDimension) {
  RandomStream rng(4);
  const GaussianMixture mix = oracle::RandomMixture(rng, 3, 1);
  EXPECT_THROW(LogExpectedTilt(mix, Linear(Mat(1, 3, {1, 0, 0})), Vec({0})), std::invalid_argument);
}

TEST_F(ValueQuadrature, NonConvergenceIsReported) {
  QuadratureOptions opt;
  opt.tolerance = 0.0;
  opt.max_panels = 4;
  EXPECT_THROW(
      ValueExactQuadrature(dp_, 5, Vec({0.1}), Linear(Mat(1, 1, {3.0}), 0.01), Vec({2}), meas_, y_, opt),
      QuadratureError);
}

}  // namespace
}  // namespace tiltsearch
