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

#include <benchmark/benchmark.h>

#include "tiltsearch/config.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/rewards.hpp"
#include "tiltsearch/sampler.hpp"
#include "tiltsearch/search.hpp"
#include "tiltsearch/sweep.hpp"

namespace tiltsearch {
namespace {

struct Fixture {
  ExperimentConfig config;
  DiffusionPrior dp;
  TrialSpec trial;
  RewardSpec reward;

  Fixture()
      : dp(config.Prior(), config.Schedule()),
        trial(MakeTrial(TrialSeed(0, 0), config.Prior(), config.Trial())),
        reward(RewardForSide(trial.side, config.tau)) {}
};

const Fixture& Shared() {
  static const Fixture f;
  return f;
}

void BM_ScoreHessian(benchmark::State& state) {
  const Fixture& f = Shared();
  const GaussianMixture& mix = f.dp.marginal(f.dp.steps() / 2);
  RandomStream rng(1);
  const Vector x = rng.StandardNormal(mix.dim());
  for (auto _ : state) benchmark::DoNotOptimize(Evaluate(mix, x, true));
}
BENCHMARK(BM_ScoreHessian);

void BM_ProposeStep(benchmark::State& state) {
  const Fixture& f = Shared();
  const RewardContext context{f.reward, f.trial.s};
  GuidanceConfig guidance = f.config.guidance;
  guidance.rgg_scale = static_cast<double>(state.range(0));
  RandomStream rng(2);
  const Vector x = rng.StandardNormal(f.dp.dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ProposeStep(f.dp, f.dp.steps() / 2, x, f.trial.measurement, f.trial.y, guidance, &context));
  }
}
BENCHMARK(BM_ProposeStep)->Arg(0)->Arg(1);

void BM_Search(benchmark::State& state) {
  const Fixture& f = Shared();
  const auto strategy = static_cast<Strategy>(state.range(0));
  const SearchConfig search = f.config.Search(strategy, static_cast<int>(state.range(1)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunSearch(f.trial, f.dp, f.config.guidance, search, f.reward, 7));
  }
}
BENCHMARK(BM_Search)
    ->ArgsProduct({{static_cast<int>(Strategy::kGreedySearch),
                    static_cast<int>(Strategy::kRecursiveForkJoin)},
                   {8, 32}})
    ->Unit(benchmark::kMillisecond);

void BM_ValueQuadrature(benchmark::State& state) {
  const Fixture& f = Shared();
  RandomStream rng(3);
  const int t = f.dp.steps() / 4;
  const Vector x = Sample(f.dp.marginal(t), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ValueExactQuadrature(f.dp, t, x, f.reward, f.trial.s,
                                                  f.trial.measurement, f.trial.y));
  }
}
BENCHMARK(BM_ValueQuadrature)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tiltsearch

BENCHMARK_MAIN();
