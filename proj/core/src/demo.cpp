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

#include "tiltsearch/demo.hpp"

#include <cstdio>
#include <stdexcept>

#include "tiltsearch/gmm.hpp"
#include "tiltsearch/random.hpp"
#include "tiltsearch/search.hpp"
#include "tiltsearch/sweep.hpp"

namespace tiltsearch {
namespace {

constexpr std::uint64_t kPriorCloudTag = 0x7072696f72ULL;  // "prior"

double MeanDistance(const std::vector<Vector>& points, std::size_t begin, const Vector& x0) {
  double sum = 0.0;
  for (std::size_t i = begin; i < points.size(); ++i) sum += (points[i] - x0).norm();
  return sum / static_cast<double>(points.size() - begin);
}

void AddRun(DemoCloud& cloud, const std::vector<Vector>& states, const Vector& x0) {
  const std::size_t begin = cloud.points.size();
  cloud.points.insert(cloud.points.end(), states.begin(), states.end());
  cloud.rep_distances.push_back(MeanDistance(cloud.points, begin, x0));
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DemoResult RunSideInfoDemo(const ExperimentConfig& config) {
  config.Validate();
  if (config.side_kind != SideKind::kLinear) {
    throw std::invalid_argument("the side-information demo needs side_kind = linear");
  }
  const std::uint64_t seed = TrialSeed(config.master_seed, config.demo_trial);
  return RunSideInfoDemo(config, MakeTrial(seed, config.Prior(), config.Trial()));
}

DemoResult RunSideInfoDemo(const ExperimentConfig& config, const TrialSpec& trial) {
  config.Validate();
  const GaussianMixture prior = config.Prior();
  const DiffusionPrior dp(prior, config.Schedule());
  const RewardSpec reward = RewardForSide(trial.side, config.tau);
  const int n = config.demo_particles;

  GuidanceConfig plain = config.guidance;
  plain.rgg_scale = 0.0;

  DemoResult result;
  result.trial = trial;
  result.clouds.push_back({"prior", 0, {}, {}});
  result.clouds.push_back({"dps", 0, {}, {}});
  for (int b : config.demo_bases) result.clouds.push_back({"rfjs_B" + std::to_string(b), b, {}, {}});

  for (int rep = 0; rep < config.demo_repetitions; ++rep) {
    const std::uint64_t search_seed = SearchSeed(trial.seed, n, rep);

    RandomStream rng(MixSeed({kPriorCloudTag, search_seed}));
    std::vector<Vector> samples;
    for (int i = 0; i < n; ++i) samples.push_back(Sample(prior, rng));
    AddRun(result.clouds[0], samples, trial.x0_true);

    const SearchResult dps = RunSearch(trial, dp, plain, config.Search(Strategy::kBestOfN, n, 1),
                                       reward, search_seed);
    AddRun(result.clouds[1], dps.ensemble.states, trial.x0_true);

    for (std::size_t j = 0; j < config.demo_bases.size(); ++j) {
      const SearchResult out = RunSearch(
          trial, dp, config.guidance,
          config.Search(Strategy::kRecursiveForkJoin, n, config.demo_bases[j]), reward, search_seed);
      AddRun(result.clouds[2 + j], out.ensemble.states, trial.x0_true);
    }
  }
  return result;
}

void WriteDemo(const DemoResult& result, const std::filesystem::path& dir) {
  std::string summary = "label,B,rep,mean_distance\n";
  for (const DemoCloud& cloud : result.clouds) {
    std::string points = "x1,x2,label\n";
    for (const Vector& p : cloud.points) {
      if (p.size() != 2) throw std::invalid_argument("demo point files need 2D particles");
      points += Num(p[0]) + ',' + Num(p[1]) + ',' + cloud.label + '\n';
    }
    WriteFileAtomic(dir / ("points_" + cloud.label + ".csv"), points);
    for (std::size_t r = 0; r < cloud.rep_distances.size(); ++r) {
      summary += cloud.label + ',' + std::to_string(cloud.base) + ',' + std::to_string(r) + ',' +
                 Num(cloud.rep_distances[r]) + '\n';
    }
  }
  WriteFileAtomic(dir / "demo_summary.csv", summary);
}

}  // namespace tiltsearch
