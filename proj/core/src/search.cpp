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

#include "tiltsearch/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace tiltsearch {
namespace {

constexpr std::uint64_t kParticleTag = 0x7061727469636c65ULL;
constexpr std::uint64_t kResampleTag = 0x726573616d706c65ULL;

bool IsPowerOfTwo(int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

int Log2(int v) { return std::bit_width(static_cast<unsigned>(v)) - 1; }

}  // namespace

std::string ToString(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBestOfN: return "BON";
    case Strategy::kGreedySearch: return "GS";
    case Strategy::kRecursiveForkJoin: return "RFJS";
  }
  return "?";
}

std::string ToString(ResampleMode mode) {
  return mode == ResampleMode::kGreedy ? "greedy" : "categorical";
}

std::string ToString(CategoricalWeights weights) {
  return weights == CategoricalWeights::kIncremental ? "incremental" : "absolute";
}

void SearchConfig::Validate() const {
  if (particles < 1) throw std::invalid_argument("search: particle count N must be >= 1");
  if (base < 1) throw std::invalid_argument("search: base_B must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("search: tau must be positive");
  if (strategy == Strategy::kRecursiveForkJoin) {
    if (!IsPowerOfTwo(particles)) throw std::invalid_argument("search: RFJS needs N a power of two");
    if (!IsPowerOfTwo(base)) throw std::invalid_argument("search: RFJS needs base_B a power of two");
  }
}

int GroupSize(Strategy strategy, int particles, int base, int t) {
  if (t < 1) throw std::out_of_range("group_size: t must be >= 1");
  if (particles < 1 || base < 1) throw std::invalid_argument("group_size: N and B must be >= 1");
  switch (strategy) {
    case Strategy::kBestOfN:
      return 1;
    case Strategy::kGreedySearch:
      return t % base == 0 ? particles : 1;
    case Strategy::kRecursiveForkJoin: {
      if (!IsPowerOfTwo(particles) || !IsPowerOfTwo(base)) {
        throw std::invalid_argument("group_size: RFJS needs N and B powers of two");
      }
      const int depth = std::min(Log2(particles), Log2(base));
      for (int i = 0; i <= depth; ++i) {
        if (t % (base >> i) == 0) return particles >> i;
      }
      return 1;
    }
  }
  return 1;
}

std::vector<int> ResampleIndices(std::span<const double> rewards, int group, double tau,
                                 ResampleMode mode, RandomStream& rng) {
  const int n = static_cast<int>(rewards.size());
  if (group < 1 || n % group != 0) {
    throw std::invalid_argument("resample: group size " + std::to_string(group) +
                                " does not divide N = " + std::to_string(n));
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = i;
  if (group == 1) return out;

  for (int start = 0; start < n; start += group) {
    const auto block = rewards.subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(group));
    if (mode == ResampleMode::kGreedy) {
      int best = 0;
      for (int j = 1; j < group; ++j) {
        if (!std::isfinite(block[j])) throw std::invalid_argument("resample: non-finite reward");
        if (block[j] > block[best]) best = j;
      }
      if (!std::isfinite(block[0])) throw std::invalid_argument("resample: non-finite reward");
      std::fill_n(out.begin() + start, group, start + best);
    } else {
      const std::vector<double> w = TiltWeights(block, tau);
      for (int j = 0; j < group; ++j) {
        const double u = rng.Uniform();
        double acc = 0.0;
        int pick = group - 1;
        for (int c = 0; c < group; ++c) {
          acc += w[c];
          if (u < acc) {
            pick = c;
            break;
          }
        }
        while (w[pick] == 0.0) --pick;
        out[start + j] = start + pick;
      }
    }
  }
  return out;
}

std::uint64_t ParticleSeed(std::uint64_t search_seed, int index) {
  return MixSeed({search_seed, kParticleTag, static_cast<std::uint64_t>(index)});
}

SearchResult RunSearch(const TrialSpec& trial, const DiffusionPrior& dp,
                       const GuidanceConfig& guidance, const SearchConfig& search,
                       const RewardSpec& reward, std::uint64_t seed, bool record_trace) {
  search.Validate();
  guidance.Validate();
  const int n = search.particles;
  const int d = dp.dim();
  if (trial.x0_true.size() != d) throw std::invalid_argument("search: trial/prior dimension mismatch");

  std::vector<RandomStream> streams;
  streams.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) streams.emplace_back(ParticleSeed(seed, i));
  RandomStream resample_rng(MixSeed({seed, kResampleTag}));

  const RewardContext context{reward, trial.s};
  const RewardContext* rgg = guidance.rgg_scale > 0.0 ? &context : nullptr;
  const bool incremental = search.resample_mode == ResampleMode::kCategorical &&
                           search.categorical_weights == CategoricalWeights::kIncremental;

  ParticleEnsemble ens;
  ens.t = dp.steps();
  ens.states.resize(n);
  ens.x0_hats.resize(n);
  ens.x0_hat_ys.resize(n);
  ens.rewards.assign(n, 0.0);
  for (int i = 0; i < n; ++i) ens.states[i] = streams[i].StandardNormal(d);

  std::vector<StepProposal> proposals(static_cast<std::size_t>(n));
  std::vector<double> reference(static_cast<std::size_t>(n), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(n), 0.0);
  SearchResult result;
  if (record_trace) result.trace.reserve(static_cast<std::size_t>(dp.steps()));

  for (int t = dp.steps() - 1; t >= 0; --t) {
    double residual_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      proposals[i] = ProposeStep(dp, t + 1, ens.states[i], trial.measurement, trial.y, guidance, rgg);
      ens.rewards[i] = Reward(reward, proposals[i].x0_hat_y, trial.s);
      if (!std::isfinite(ens.rewards[i])) throw std::domain_error("search: non-finite reward");
      residual_sum += proposals[i].meas_residual;
    }

    const int group = t >= 1 ? GroupSize(search.strategy, n, search.base, t) : 1;
    std::vector<int> ancestors;
    if (incremental && group > 1) {
      for (int i = 0; i < n; ++i) logits[i] = ens.rewards[i] - reference[i];
      ancestors = ResampleIndices(logits, group, search.tau, search.resample_mode, resample_rng);
      for (int i = 0; i < n; ++i) reference[i] = ens.rewards[ancestors[i]];
    } else {
      ancestors = ResampleIndices(ens.rewards, group, search.tau, search.resample_mode, resample_rng);
    }

    if (record_trace) {
      StepTrace row;
      row.t = t;
      row.group = group;
      row.mean_reward = 0.0;
      row.max_reward = ens.rewards[0];
      for (double r : ens.rewards) {
        row.mean_reward += r / n;
        row.max_reward = std::max(row.max_reward, r);
      }
      row.mean_residual = residual_sum / n;
      result.trace.push_back(row);
    }

    std::vector<double> rewards_after(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const StepProposal& parent = proposals[ancestors[i]];
      ens.states[i] = FinishStep(parent, streams[i]);
      ens.x0_hats[i] = parent.x0_hat;
      ens.x0_hat_ys[i] = parent.x0_hat_y;
      rewards_after[i] = ens.rewards[ancestors[i]];
    }
    ens.rewards = std::move(rewards_after);
    ens.t = t;
  }

  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (ens.rewards[i] > ens.rewards[best]) best = i;
  }
  result.best_index = best;
  result.x0_star = ens.states[best];
  result.final_reward = ens.rewards[best];
  result.meas_residual = (trial.y - trial.measurement.a * result.x0_star).norm();
  result.ensemble = std::move(ens);
  return result;
}

}  // namespace tiltsearch
