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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/random.hpp"
#include "tiltsearch/rewards.hpp"
#include "tiltsearch/sampler.hpp"

namespace tiltsearch {

enum class Strategy { kBestOfN, kGreedySearch, kRecursiveForkJoin };
enum class ResampleMode { kCategorical, kGreedy };

// What a categorical draw is weighted by. kIncremental uses the reward gained
// since the particle's last resampling, exp((r - r_ref) / tau), so repeated
// resampling targets p * exp(r / tau) instead of compounding the tilt.
// kAbsolute uses exp(r / tau) at every event.
enum class CategoricalWeights { kIncremental, kAbsolute };

std::string ToString(Strategy strategy);
std::string ToString(ResampleMode mode);
std::string ToString(CategoricalWeights weights);

struct SearchConfig {
  Strategy strategy = Strategy::kRecursiveForkJoin;
  int particles = 8;
  int base = 4;
  double tau = 1.0;
  ResampleMode resample_mode = ResampleMode::kGreedy;
  CategoricalWeights categorical_weights = CategoricalWeights::kIncremental;

  // Throws std::invalid_argument: N >= 1, B >= 1, tau > 0, and powers of two
  // for N and B under RFJS.
  void Validate() const;
};

// Group size g_t for loop step t >= 1. BON: always 1. GS: N when B | t, else 1.
// RFJS: N / 2^j with j the smallest i in [0, min(log2 N, log2 B)] such that
// (B / 2^i) | t; 1 if there is none.
int GroupSize(Strategy strategy, int particles, int base, int t);

// Resampled ancestor indices (0-based). Groups are consecutive blocks of
// size g; every index maps inside its own block. g = 1 returns the identity
// without touching `rng`. Greedy replicates each block's argmax (lowest index
// on ties). Throws std::invalid_argument if g does not divide N.
std::vector<int> ResampleIndices(std::span<const double> rewards, int group, double tau,
                                 ResampleMode mode, RandomStream& rng);

struct ParticleEnsemble {
  int t = 0;
  std::vector<Vector> states;
  std::vector<Vector> x0_hats;
  std::vector<Vector> x0_hat_ys;
  std::vector<double> rewards;
};

struct StepTrace {
  int t = 0;
  int group = 1;
  double mean_reward = 0.0;
  double max_reward = 0.0;
  double mean_residual = 0.0;
};

struct SearchResult {
  Vector x0_star;
  double final_reward = 0.0;
  double meas_residual = 0.0;  // ||y - A x0_star||
  int best_index = 0;
  ParticleEnsemble ensemble;  // states hold the final x_0 particles
  std::vector<StepTrace> trace;
};

// Per-particle stream seeds split from one search seed. Particle i's initial
// state and every noise draw at position i come from ParticleSeed(seed, i).
std::uint64_t ParticleSeed(std::uint64_t search_seed, int index);

// Particle search over loop steps t = T-1 .. 0: propose from each x_{t+1},
// score r(x0_hat_Y; s), resample within groups of size g_t (skipped at t = 0),
// then add the step noise. Returns the final particle with the highest last
// computed reward.
SearchResult RunSearch(const TrialSpec& trial, const DiffusionPrior& dp,
                       const GuidanceConfig& guidance, const SearchConfig& search,
                       const RewardSpec& reward, std::uint64_t seed, bool record_trace = false);

}  // namespace tiltsearch
