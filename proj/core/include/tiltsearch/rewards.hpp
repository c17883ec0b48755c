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
#include <stdexcept>
#include <variant>
#include <vector>

#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/linalg.hpp"

namespace tiltsearch {

// r(x; s) = -||s - B x||^2
struct NegQuadraticLinear {
  Matrix b;
};

// r(x; s) = cos(r_theta(x), s); zero when either vector vanishes.
struct CosineMlp {
  MlpNetwork net;
};

struct RewardSpec {
  std::variant<NegQuadraticLinear, CosineMlp> kind;
  double tau = 1.0;
};

// Reward whose kind matches the trial's side-information model.
RewardSpec RewardForSide(const SideInfoModel& side, double tau);

double Reward(const RewardSpec& spec, const Vector& x0_hat, const Vector& s);
// Analytic gradient of Reward in x0_hat. Zero on the zero-embedding set.
Vector RewardGradient(const RewardSpec& spec, const Vector& x0_hat, const Vector& s);

// r(x0_hat_Y; s) / tau. Throws std::invalid_argument for tau <= 0.
double ValueHat(const RewardSpec& spec, const Vector& x0_hat_y, const Vector& s);

// Normalized exp(r / tau) with max-shift. Throws std::invalid_argument on an
// empty input, tau <= 0 or a non-finite reward.
std::vector<double> TiltWeights(std::span<const double> rewards, double tau);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  double window_sigmas = 8.0;
  double tolerance = 1e-8;
  int initial_panels = 2;
  int max_panels = 256;  // per axis, per component
};

// log E[exp(r(X_0; s) / tau)] with X_0 ~ p_{0|t,Y}(. | x_t, y), by composite
// Gauss-Legendre quadrature over each posterior component's window. Only
// d <= 2. Throws QuadratureError if refinement hits max_panels without
// reaching the tolerance.
double ValueExactQuadrature(const DiffusionPrior& dp, int t, const Vector& x_t,
                            const RewardSpec& spec, const Vector& s,
                            const LinearMeasurement& measurement, const Vector& y,
                            const QuadratureOptions& options = {});

// Same integral against an arbitrary mixture of at most two dimensions:
// log E_mix[exp(r / tau)].
double LogExpectedTilt(const GaussianMixture& mix, const RewardSpec& spec, const Vector& s,
                       const QuadratureOptions& options = {});

}  // namespace tiltsearch
