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

#include "tiltsearch/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/random.hpp"
#include "tiltsearch/rewards.hpp"
#include "tiltsearch/sampler.hpp"
#include "tiltsearch/search.hpp"

namespace tiltsearch {
namespace {

GaussianMixture RandomMixture(RandomStream& rng, int d, int k) {
  std::vector<double> w;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    w.push_back(0.2 + rng.Uniform());
    total += w.back();
    means.push_back(2.0 * rng.StandardNormal(d));
    Matrix l(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) l(r, c) = 0.5 * rng.Normal();
    }
    covs.push_back(l * l.transpose() + 0.1 * Matrix::Identity(d, d));
  }
  for (double& x : w) x /= total;
  return GaussianMixture(std::move(w), std::move(means), std::move(covs));
}

// Central differences of a vector map, one column per input coordinate.
Matrix FdJacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

bool Report(std::ostream& out, const std::string& name, double value, double limit) {
  const bool ok = std::isfinite(value) && value < limit;
  out << (ok ? "PASS " : "FAIL ") << name << "  max error " << value << " (limit " << limit
      << ")\n";
  return ok;
}

double ScoreCheck(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianMixture mix = RandomMixture(rng, 1 + trial % 3, 1 + trial % 4);
    const Vector x = mix.mean(0) + rng.StandardNormal(mix.dim());
    const Vector g = Score(mix, x);
    const Matrix fd = FdJacobian(
        [&](const Vector& p) {
          Vector v(1);
          v[0] = LogDensity(mix, p);
          return v;
        },
        x, 1e-5);
    worst = std::max(worst, (g - fd.row(0).transpose()).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

double HessianCheck(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianMixture mix = RandomMixture(rng, 1 + trial % 3, 1 + trial % 4);
    const Vector x = mix.mean(0) + rng.StandardNormal(mix.dim());
    const Matrix fd = FdJacobian([&](const Vector& p) { return Score(mix, p); }, x, 1e-5);
    worst = std::max(worst, (ScoreHessian(mix, x) - fd).cwiseAbs().maxCoeff());
  }
  return worst;
}

double TweedieCheck(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianMixture mix = RandomMixture(rng, 1 + trial % 3, 1 + trial % 4);
    const DiffusionPrior dp(mix, DiffusionSchedule::Linear(50, 1e-4, 0.08));
    const int t = 1 + trial * 2;
    const Vector x = dp.marginal(t).mean(0) + rng.StandardNormal(mix.dim());
    const double ab = dp.alpha_bar(t);
    const Matrix fd = FdJacobian([&](const Vector& p) { return TweedieDenoise(dp, t, p); }, x, 1e-5);
    const Matrix lhs = ((1.0 - ab) / std::sqrt(ab)) * fd;
    worst = std::max(worst, (lhs - ConditionalPosterior(dp, t, x).Covariance()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double ConjugacyCheck(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const GaussianMixture prior = RandomMixture(rng, 1, 3);
    Matrix a(1, 1);
    a(0, 0) = 0.5 + rng.Uniform();
    const double sigma = 0.3 + 0.5 * rng.Uniform();
    Vector y(1);
    y[0] = a(0, 0) * Sample(prior, rng)[0] + sigma * rng.Normal();
    const GaussianMixture post = ExactPosterior(prior, a, sigma, y);

    constexpr int kCells = 20000;
    const double lo = -15.0, hi = 15.0, dx = (hi - lo) / kCells;
    std::vector<double> grid(kCells), exact(kCells);
    double mass = 0.0;
    for (int i = 0; i < kCells; ++i) {
      Vector x(1);
      x[0] = lo + (i + 0.5) * dx;
      const double r = y[0] - a(0, 0) * x[0];
      grid[i] = std::exp(LogDensity(prior, x) - 0.5 * r * r / (sigma * sigma));
      exact[i] = std::exp(LogDensity(post, x));
      mass += grid[i] * dx;
    }
    double l1 = 0.0;
    for (int i = 0; i < kCells; ++i) l1 += std::abs(grid[i] / mass - exact[i]) * dx;
    worst = std::max(worst, l1);
  }
  return worst;
}

double RggCheck(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GaussianMixture mix = RandomMixture(rng, 2, 1 + trial % 4);
    const DiffusionPrior dp(mix, DiffusionSchedule::Linear(50, 1e-4, 0.08));
    const int t = 1 + trial * 4;
    const Vector x = dp.marginal(t).mean(0) + rng.StandardNormal(2);
    RewardSpec spec;
    Vector s;
    if (trial % 2 == 0) {
      Matrix b(1, 2);
      b << rng.Normal(), rng.Normal();
      spec.kind = NegQuadraticLinear{b};
      s = rng.StandardNormal(1);
    } else {
      spec.kind = CosineMlp{MlpNetwork::Random(rng, 2, {8}, 3)};
      s = rng.StandardNormal(3);
    }
    const Vector g = RggGrad(dp, t, x, spec, s, GradientMode::kAnalytic);
    const Matrix fd = FdJacobian(
        [&](const Vector& p) {
          Vector v(1);
          v[0] = Reward(spec, TweedieDenoise(dp, t, p), s);
          return v;
        },
        x, 1e-5);
    worst = std::max(worst, (g - fd.row(0).transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Largest gap between categorical resampling frequencies and exp(r / tau).
double ResampleCheck(RandomStream& rng) {
  const std::vector<double> rewards = {0.0, 0.5, -1.0, 1.5};
  const std::vector<double> target = TiltWeights(rewards, 1.0);
  std::vector<double> counts(rewards.size(), 0.0);
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    for (int idx : ResampleIndices(rewards, 4, 1.0, ResampleMode::kCategorical, rng)) counts[idx] += 1;
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    worst = std::max(worst, std::abs(counts[k] / (4.0 * kDraws) - target[k]));
  }
  return worst;
}

}  // namespace

bool RunSelfChecks(std::ostream& out) {
  RandomStream rng(MixSeed({0x73656c66ULL}));
  bool ok = true;
  ok &= Report(out, "score vs finite differences (relative)", ScoreCheck(rng), 1e-5);
  ok &= Report(out, "score Hessian vs finite differences", HessianCheck(rng), 1e-4);
  ok &= Report(out, "Tweedie Jacobian vs posterior covariance", TweedieCheck(rng), 1e-4);
  ok &= Report(out, "conjugate posterior vs grid (L1)", ConjugacyCheck(rng), 1e-3);
  ok &= Report(out, "reward-gradient guidance vs finite differences", RggCheck(rng), 1e-4);
  ok &= Report(out, "categorical resampling frequencies", ResampleCheck(rng), 0.01);
  return ok;
}

}  // namespace tiltsearch
