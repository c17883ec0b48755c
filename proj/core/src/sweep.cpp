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

#include "tiltsearch/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "tiltsearch/random.hpp"

namespace tiltsearch {
namespace {

constexpr std::uint64_t kTrialTag = 0x747269616cULL;   // "trial"
constexpr std::uint64_t kSearchTag = 0x736561726368ULL;  // "search"

struct Cell {
  Strategy strategy;
  int particles;
  int base;
  int rep;
};

std::vector<Cell> Cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (Strategy s : config.strategies) {
    for (int n : config.particles) {
      for (int b : config.bases) {
        for (int rep = 0; rep < config.repetitions; ++rep) cells.push_back({s, n, b, rep});
      }
    }
  }
  return cells;
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t TrialSeed(std::uint64_t master_seed, int index) {
  return MixSeed({kTrialTag, master_seed, static_cast<std::uint64_t>(index)});
}

std::uint64_t SearchSeed(std::uint64_t trial_seed, int particles, int rep) {
  return MixSeed({kSearchTag, trial_seed, static_cast<std::uint64_t>(particles),
                  static_cast<std::uint64_t>(rep)});
}

std::vector<TrialResult> RunSweep(const ExperimentConfig& config, const SweepOptions& options) {
  config.Validate();
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
  const GaussianMixture prior = config.Prior();
  const DiffusionPrior dp(prior, config.Schedule());
  const TrialOptions trial_options = config.Trial();
  const double peak = config.Peak();
  const std::vector<Cell> cells = Cells(config);
  const std::size_t per_trial = cells.size();

  std::vector<TrialResult> results(per_trial * static_cast<std::size_t>(config.trial_count));
  for (int i = 0; i < config.trial_count; ++i) {
    const std::uint64_t seed = TrialSeed(config.master_seed, i);
    for (std::size_t c = 0; c < per_trial; ++c) {
      TrialResult& r = results[static_cast<std::size_t>(i) * per_trial + c];
      r.trial_seed = seed;
      r.strategy = cells[c].strategy;
      r.particles = cells[c].particles;
      r.base = cells[c].base;
      r.rep = cells[c].rep;
    }
  }

  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < config.trial_count; i = next++) {
      TrialResult* row = results.data() + static_cast<std::size_t>(i) * per_trial;
      TrialSpec trial;
      try {
        trial = MakeTrial(row->trial_seed, prior, trial_options);
      } catch (const std::exception& e) {
        for (std::size_t c = 0; c < per_trial; ++c) {
          row[c].psnr = row[c].final_reward = row[c].meas_residual = std::nan("");
          row[c].error = e.what();
        }
        continue;
      }
      const RewardSpec reward = RewardForSide(trial.side, config.tau);
      for (std::size_t c = 0; c < per_trial; ++c) {
        TrialResult& r = row[c];
        const auto start = std::chrono::steady_clock::now();
        try {
          const SearchResult out =
              RunSearch(trial, dp, config.guidance, config.Search(r.strategy, r.particles, r.base),
                        reward, SearchSeed(r.trial_seed, r.particles, r.rep));
          r.psnr = Psnr(out.x0_star, trial.x0_true, peak, config.psnr_cap);
          r.psnr_capped = r.psnr >= config.psnr_cap;
          r.final_reward = out.final_reward;
          r.meas_residual = out.meas_residual;
        } catch (const std::exception& e) {
          r.psnr = r.final_reward = r.meas_residual = std::nan("");
          r.error = e.what();
        }
        if (options.record_timing) {
          r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                   start)
                             .count();
        }
      }
    }
  };

  const int extra = std::min(options.workers, config.trial_count) - 1;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(extra));
  for (int w = 0; w < extra; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  return results;
}

std::string FormatSweepCsv(const std::vector<TrialResult>& results) {
  std::string out = kSweepHeader;
  out += '\n';
  for (const TrialResult& r : results) {
    out += ToString(r.strategy) + ',' + std::to_string(r.particles) + ',' + std::to_string(r.base) +
           ',' + std::to_string(r.trial_seed) + ',' + std::to_string(r.rep) + ',' + Num(r.psnr) +
           ',' + Num(r.final_reward) + ',' + Num(r.meas_residual) + ',' + Num(r.elapsed_ms) + '\n';
  }
  return out;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path dir = path.has_parent_path() ? path.parent_path() : ".";
  std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace tiltsearch
