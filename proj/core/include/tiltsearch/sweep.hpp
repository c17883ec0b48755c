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
#include <filesystem>
#include <string>
#include <vector>

#include "tiltsearch/config.hpp"
#include "tiltsearch/metrics.hpp"

namespace tiltsearch {

inline constexpr const char* kSweepHeader =
    "strategy,N,B,trial_seed,rep,psnr_db,final_reward,meas_residual,elapsed_ms";

// Seed of trial `index` under `master_seed`.
std::uint64_t TrialSeed(std::uint64_t master_seed, int index);

// Search seed of one repetition. Strategy and B are left out on purpose so
// every (strategy, B) cell of a repetition shares particle streams.
std::uint64_t SearchSeed(std::uint64_t trial_seed, int particles, int rep);

struct SweepOptions {
  int workers = 1;
  bool record_timing = true;  // false writes 0 in elapsed_ms
};

// Results ordered by trial, then strategy, N, B and rep as listed in the
// config. The order and every value except elapsed_ms do not depend on the
// worker count. A trial or search that throws yields rows with `error` set.
std::vector<TrialResult> RunSweep(const ExperimentConfig& config, const SweepOptions& options = {});

// One line per result under kSweepHeader. Failed rows carry nan metrics.
std::string FormatSweepCsv(const std::vector<TrialResult>& results);

// Writes through a temporary file in the same directory and renames it.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tiltsearch
