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

#include "tiltsearch/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace tiltsearch {
namespace {

void CheckShapes(const DiffusionPrior& dp, const Vector& x_t, const LinearMeasurement& measurement,
                 const Vector& y) {
  if (x_t.size() != dp.dim() || measurement.a.cols() != dp.dim() ||
      measurement.a.rows() != y.size()) {
    throw std::invalid_argument("sampler: state, operator and measurement shapes disagree");
  }
}

// -2 J^T A^T (y - A x0_hat)
Vector ResidualGradient(const Denoised& den, const LinearMeasurement& measurement, const Vector& y,
                        Vector* residual) {
  *residual = y - measurement.a * den.x0_hat;
  return -2.0 * den.jacobian.transpose() * (measurement.a.transpose() * *residual);
}

double RewardAtDenoised(const DiffusionPrior& dp, int t, const Vector& x, const RewardSpec& spec,
                        const Vector& s) {
  return Reward(spec, TweedieDenoise(dp, t, x), s);
}

}  // namespace

void GuidanceConfig::Validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!ok(zeta)) throw std::invalid_argument("guidance: zeta must be finite and >= 0");
  if (!ok(eta)) throw std::invalid_argument("guidance: eta must be finite and >= 0");
  if (!ok(rgg_scale)) throw std::invalid_argument("guidance: rgg_scale must be finite and >= 0");
}

Vector MeasGrad(const DiffusionPrior& dp, int t, const Vector& x_t,
                const LinearMeasurement& measurement, const Vector& y) {
  CheckShapes(dp, x_t, measurement, y);
  const Denoised den = DenoiseWithJacobian(dp, t, x_t);
  Vector residual;
  return ResidualGradient(den, measurement, y, &residual);
}

Vector CorrectedX0(const DiffusionPrior& dp, int t, const Vector& x_t,
                   const LinearMeasurement& measurement, const Vector& y, double eta) {
  CheckShapes(dp, x_t, measurement, y);
  if (!(eta >= 0.0)) throw std::invalid_argument("corrected_x0: eta must be >= 0");
  const Denoised den = DenoiseWithJacobian(dp, t, x_t);
  if (eta == 0.0) return den.x0_hat;
  Vector residual;
  const Vector grad = ResidualGradient(den, measurement, y, &residual);
  const double abar = dp.alpha_bar(t);
  return den.x0_hat - ((1.0 - abar) / std::sqrt(abar)) * eta * grad;
}

Vector RggGrad(const DiffusionPrior& dp, int t, const Vector& x_t, const RewardSpec& spec,
               const Vector& s, GradientMode mode) {
  Vector grad;
  if (mode == GradientMode::kAnalytic) {
    const Denoised den = DenoiseWithJacobian(dp, t, x_t);
    grad = den.jacobian.transpose() * RewardGradient(spec, den.x0_hat, s);
  } else {
    grad = Vector::Zero(x_t.size());
    for (Eigen::Index i = 0; i < x_t.size(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x_t[i]));
      Vector hi = x_t;
      Vector lo = x_t;
      hi[i] += h;
      lo[i] -= h;
      grad[i] = (RewardAtDenoised(dp, t, hi, spec, s) - RewardAtDenoised(dp, t, lo, spec, s)) /
                (hi[i] - lo[i]);
    }
  }
  if (!grad.allFinite()) throw std::domain_error("rgg_grad: non-finite gradient");
  return grad;
}

StepProposal ProposeStep(const DiffusionPrior& dp, int t, const Vector& x_t,
                         const LinearMeasurement& measurement, const Vector& y,
                         const GuidanceConfig& guidance, const RewardContext* reward) {
  dp.schedule().CheckStep(t);
  CheckShapes(dp, x_t, measurement, y);
  const double beta = dp.schedule().beta(t);
  const double abar = dp.alpha_bar(t);
  const double abar_prev = dp.alpha_bar(t - 1);

  const Denoised den = DenoiseWithJacobian(dp, t, x_t);
  Vector residual;
  const Vector grad = ResidualGradient(den, measurement, y, &residual);

  StepProposal out;
  out.x0_hat = den.x0_hat;
  out.meas_residual = residual.norm();
  out.x0_hat_y = guidance.eta == 0.0
                     ? den.x0_hat
                     : Vector(den.x0_hat - ((1.0 - abar) / std::sqrt(abar)) * guidance.eta * grad);

  out.mean = (x_t + beta * den.score) / std::sqrt(1.0 - beta);
  if (guidance.zeta != 0.0) {
    if (guidance.zeta_mode == ZetaMode::kRaw) {
      out.mean -= guidance.zeta * grad;
    } else if (out.meas_residual > 0.0) {
      out.mean -= (guidance.zeta / (2.0 * out.meas_residual)) * grad;
    }
  }
  if (guidance.rgg_scale != 0.0 && reward != nullptr) {
    const Vector rgg =
        guidance.rgg_mode == GradientMode::kAnalytic
            ? Vector(den.jacobian.transpose() * RewardGradient(reward->spec, den.x0_hat, reward->s))
            : RggGrad(dp, t, x_t, reward->spec, reward->s, GradientMode::kFiniteDifference);
    if (!rgg.allFinite()) throw std::domain_error("rgg_grad: non-finite gradient");
    out.mean += guidance.rgg_scale * rgg;
  }
  out.noise_std = std::sqrt(beta * (1.0 - abar_prev) / (1.0 - abar));
  return out;
}

Vector FinishStep(const StepProposal& proposal, RandomStream& rng) {
  if (proposal.noise_std == 0.0) return proposal.mean;
  Vector x = proposal.mean;
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += proposal.noise_std * rng.Normal();
  return x;
}

StepOutput AncestralStep(const DiffusionPrior& dp, int t, const Vector& x_t,
                         const LinearMeasurement& measurement, const Vector& y,
                         const GuidanceConfig& guidance, const RewardContext* reward,
                         RandomStream& rng) {
  StepProposal proposal = ProposeStep(dp, t, x_t, measurement, y, guidance, reward);
  StepOutput out;
  out.x_prev = FinishStep(proposal, rng);
  out.x0_hat = std::move(proposal.x0_hat);
  out.x0_hat_y = std::move(proposal.x0_hat_y);
  out.meas_residual = proposal.meas_residual;
  return out;
}

Vector SampleChain(const DiffusionPrior& dp, const LinearMeasurement& measurement, const Vector& y,
                   const GuidanceConfig& guidance, const RewardContext* reward, RandomStream& rng) {
  Vector x = rng.StandardNormal(dp.dim());
  for (int t = dp.steps(); t >= 1; --t) {
    x = AncestralStep(dp, t, x, measurement, y, guidance, reward, rng).x_prev;
  }
  return x;
}

}  // namespace tiltsearch
