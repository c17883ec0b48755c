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
#include <optional>
#include <string>
#include <vector>

#include "tiltsearch/gmm.hpp"
#include "tiltsearch/linalg.hpp"
#include "tiltsearch/search.hpp"

namespace tiltsearch {

inline constexpr double kDefaultPsnrCap = 100.0;

// 10 log10(peak^2 / MSE), or `cap` when MSE < 1e-12 (or the value would exceed it).
double Psnr(const Vector& x_hat, const Vector& x0_true, double peak, double cap = kDefaultPsnrCap);

// Peak for unbounded signals drawn from `prior`: the largest component-mean
// norm plus three standard deviations along the largest covariance eigenvalue.
double PeakFromPrior(const GaussianMixture& prior);

struct TrialResult {
  std::uint64_t trial_seed = 0;
  Strategy strategy = Strategy::kRecursiveForkJoin;
  int particles = 0;
  int base = 0;
  int rep = 0;
  double psnr = 0.0;
  bool psnr_capped = false;
  double final_reward = 0.0;
  double meas_residual = 0.0;
  double elapsed_ms = 0.0;
  std::optional<std::string> error;
};

enum class GroupKey { kStrategy, kParticles, kBase };

struct SummaryRow {
  std::optional<Strategy> strategy;
  std::optional<int> particles;
  std::optional<int> base;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double stderr_mean = 0.0;
};

// PSNR summary per distinct key tuple, rows ordered by key. Failed trials are
// skipped. Throws std::invalid_argument on empty input.
std::vector<SummaryRow> Aggregate(const std::vector<TrialResult>& results,
                                  const std::vector<GroupKey>& keys);

// Welford running moments.
class RunningStats {
 public:
  void Add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return shift_ + mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const;

 private:
  std::size_t n_ = 0;
  double shift_ = 0.0;  // first sample; accumulating offsets keeps large means exact
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace tiltsearch
