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

#include "tiltsearch/schedule.hpp"

#include <stdexcept>
#include <string>

namespace tiltsearch {

DiffusionSchedule DiffusionSchedule::Linear(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw std::invalid_argument("schedule: step count must be positive");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    throw std::invalid_argument("schedule: need 0 < beta_min <= beta_max < 1");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[i] = beta_min + (beta_max - beta_min) * frac;
  }
  return DiffusionSchedule(std::move(betas));
}

DiffusionSchedule::DiffusionSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw std::invalid_argument("schedule: empty beta list");
  alpha_bars_.resize(betas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    if (!(betas_[i] > 0.0 && betas_[i] < 1.0)) {
      throw std::invalid_argument("schedule: beta " + std::to_string(i + 1) + " outside (0, 1)");
    }
    alpha_bars_[i + 1] = alpha_bars_[i] * (1.0 - betas_[i]);
  }
}

void DiffusionSchedule::CheckStep(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw std::out_of_range("schedule: step " + std::to_string(t) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(steps()) + "]");
  }
}

double DiffusionSchedule::beta(int t) const {
  CheckStep(t);
  return betas_[static_cast<std::size_t>(t - 1)];
}

double DiffusionSchedule::alpha_bar(int t) const {
  CheckStep(t, 0);
  return alpha_bars_[static_cast<std::size_t>(t)];
}

}  // namespace tiltsearch
