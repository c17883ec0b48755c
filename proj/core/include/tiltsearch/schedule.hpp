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

#include <span>
#include <vector>

namespace tiltsearch {

// Discrete variance-preserving noise schedule. Steps are 1-based: beta(t) and
// alpha_bar(t) are defined for t in [1, T]; alpha_bar(0) == 1 by convention,
// which makes the Tweedie denoiser the identity at t = 0.
class DiffusionSchedule {
 public:
  // Linear beta ramp from beta_min (t = 1) to beta_max (t = T).
  // Throws std::invalid_argument unless 0 < beta_min <= beta_max < 1 and T >= 1.
  static DiffusionSchedule Linear(int steps, double beta_min, double beta_max);

  // Throws std::invalid_argument if any beta is outside (0, 1).
  explicit DiffusionSchedule(std::vector<double> betas);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha_bar(int t) const;

  std::span<const double> betas() const { return betas_; }
  // alpha_bar(1) .. alpha_bar(T).
  std::span<const double> alpha_bars() const { return {alpha_bars_.data() + 1, betas_.size()}; }

  // Throws std::out_of_range unless lo <= t <= T.
  void CheckStep(int t, int lo = 1) const;

 private:
  std::vector<double> betas_;
  std::vector<double> alpha_bars_;  // index 0 holds the alpha_bar(0) = 1 sentinel
};

}  // namespace tiltsearch
