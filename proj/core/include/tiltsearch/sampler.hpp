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

#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/linalg.hpp"
#include "tiltsearch/random.hpp"
#include "tiltsearch/rewards.hpp"

namespace tiltsearch {

// How zeta scales the DPS gradient: kNormalized divides the squared-residual
// gradient by 2 ||y - A x0_hat|| (a step along the gradient of the residual
// norm); kRaw uses it as is.
enum class ZetaMode { kNormalized, kRaw };
enum class GradientMode { kAnalytic, kFiniteDifference };

struct GuidanceConfig {
  double zeta = 0.3;
  ZetaMode zeta_mode = ZetaMode::kRaw;
  double eta = 0.5;
  double rgg_scale = 0.0;
  GradientMode rgg_mode = GradientMode::kAnalytic;

  // Throws std::invalid_argument unless every scale is finite and >= 0.
  void Validate() const;

  bool operator==(const GuidanceConfig&) const = default;
};

// Reward used by reward-gradient guidance.
struct RewardContext {
  const RewardSpec& spec;
  const Vector& s;
};

struct StepOutput {
  Vector x_prev;
  Vector x0_hat;
  Vector x0_hat_y;
  double meas_residual = 0.0;  // ||y - A x0_hat||
};

// Everything in a reverse step except the noise draw.
struct StepProposal {
  Vector mean;
  double noise_std = 0.0;
  Vector x0_hat;
  Vector x0_hat_y;
  double meas_residual = 0.0;
};

// grad_{x_t} ||y - A x0_hat(x_t)||^2 through the exact Tweedie Jacobian.
Vector MeasGrad(const DiffusionPrior& dp, int t, const Vector& x_t,
                const LinearMeasurement& measurement, const Vector& y);

// x0_hat - ((1 - abar_t) / sqrt(abar_t)) * eta * MeasGrad.
Vector CorrectedX0(const DiffusionPrior& dp, int t, const Vector& x_t,
                   const LinearMeasurement& measurement, const Vector& y, double eta);

// grad_{x_t} r(x0_hat(x_t); s). Throws std::domain_error on a non-finite result.
Vector RggGrad(const DiffusionPrior& dp, int t, const Vector& x_t, const RewardSpec& spec,
               const Vector& s, GradientMode mode);

// Reverse step from x_t (1 <= t <= T) to x_{t-1}: ancestral mean from the
// exact score, minus the DPS shift, plus rgg_scale * RggGrad when enabled.
// The step variance is beta_t (1 - abar_{t-1}) / (1 - abar_t), which is zero at t = 1.
StepProposal ProposeStep(const DiffusionPrior& dp, int t, const Vector& x_t,
                         const LinearMeasurement& measurement, const Vector& y,
                         const GuidanceConfig& guidance, const RewardContext* reward);

// mean + noise_std * z; draws nothing when noise_std == 0.
Vector FinishStep(const StepProposal& proposal, RandomStream& rng);

StepOutput AncestralStep(const DiffusionPrior& dp, int t, const Vector& x_t,
                         const LinearMeasurement& measurement, const Vector& y,
                         const GuidanceConfig& guidance, const RewardContext* reward,
                         RandomStream& rng);

// One full guided chain: x_T ~ N(0, I) from `rng`, then steps T .. 1.
// Returns x_0.
Vector SampleChain(const DiffusionPrior& dp, const LinearMeasurement& measurement, const Vector& y,
                   const GuidanceConfig& guidance, const RewardContext* reward, RandomStream& rng);

}  // namespace tiltsearch
