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

#include <vector>

#include "tiltsearch/linalg.hpp"
#include "tiltsearch/random.hpp"
#include "tiltsearch/schedule.hpp"

namespace tiltsearch {

// Finite mixture of full-covariance Gaussians. Each covariance is factored
// once at construction; every later solve goes through that factor.
class GaussianMixture {
 public:
  // Weights must be nonnegative and sum to one within 1e-9; they are
  // renormalized exactly. Throws std::invalid_argument on shape mismatch or a
  // covariance that is not symmetric positive definite.
  GaussianMixture(std::vector<double> weights, std::vector<Vector> means,
                  std::vector<Matrix> covariances);

  static GaussianMixture Single(const Vector& mean, const Matrix& covariance);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(weights_.size()); }

  double weight(int k) const { return weights_[k]; }
  double log_weight(int k) const { return log_weights_[k]; }
  const std::vector<double>& weights() const { return weights_; }
  const Vector& mean(int k) const { return means_[k]; }
  const Matrix& covariance(int k) const { return covariances_[k]; }
  const Cholesky& factor(int k) const { return factors_[k]; }
  // Sigma_k^{-1}, obtained by solving against the cached factor.
  const Matrix& precision(int k) const { return precisions_[k]; }
  // -0.5 * log det(2 pi Sigma_k).
  double log_normalizer(int k) const { return log_normalizers_[k]; }

  Vector Mean() const;
  Matrix Covariance() const;

 private:
  int dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Cholesky> factors_;
  std::vector<Matrix> precisions_;
  std::vector<double> log_normalizers_;
};

// Log density, gradient and Hessian of log p at one point.
struct LocalGeometry {
  double log_density = 0.0;
  Vector score;
  Matrix hessian;  // empty unless requested
};

LocalGeometry Evaluate(const GaussianMixture& mix, const Vector& x, bool with_hessian);

double LogDensity(const GaussianMixture& mix, const Vector& x);
Vector Score(const GaussianMixture& mix, const Vector& x);
Matrix ScoreHessian(const GaussianMixture& mix, const Vector& x);

// Posterior component probabilities at x, computed in log space.
std::vector<double> Responsibilities(const GaussianMixture& mix, const Vector& x);

// Law of x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps for x_0 ~ prior.
// Throws std::out_of_range unless 1 <= t <= T.
GaussianMixture DiffusedMarginal(const GaussianMixture& prior, const DiffusionSchedule& schedule,
                                 int t);

// A prior bundled with its schedule and every diffused marginal, precomputed.
// marginal(0) is the prior itself.
class DiffusionPrior {
 public:
  DiffusionPrior(GaussianMixture prior, DiffusionSchedule schedule);

  const GaussianMixture& prior() const { return marginals_.front(); }
  const DiffusionSchedule& schedule() const { return schedule_; }
  const GaussianMixture& marginal(int t) const;
  double alpha_bar(int t) const { return schedule_.alpha_bar(t); }
  int dim() const { return prior().dim(); }
  int steps() const { return schedule_.steps(); }

 private:
  DiffusionSchedule schedule_;
  std::vector<GaussianMixture> marginals_;
};

// E[X_0 | x_t] through the exact marginal score (identity at t = 0).
Vector TweedieDenoise(const DiffusionPrior& dp, int t, const Vector& x_t);

// Tweedie estimate together with its Jacobian in x_t,
// (I + (1 - abar_t) H_t(x_t)) / sqrt(abar_t).
struct Denoised {
  Vector x0_hat;
  Matrix jacobian;
  Vector score;
};
Denoised DenoiseWithJacobian(const DiffusionPrior& dp, int t, const Vector& x_t);

// p_{0|t}(. | x_t): one Gaussian conditional per prior component, weighted by
// the diffused-marginal responsibilities at x_t.
struct ConditionalMixture {
  std::vector<double> responsibilities;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  Vector Mean() const;
  Matrix Covariance() const;
  GaussianMixture AsMixture() const;
};

// Requires 1 <= t <= T.
ConditionalMixture ConditionalPosterior(const DiffusionPrior& dp, int t, const Vector& x_t);

// Exact p(x_0 | y) for y = A x_0 + sigma_y z. Throws std::invalid_argument for
// sigma_y <= 0 or shape mismatch, std::domain_error if a component's
// innovation covariance cannot be factored.
GaussianMixture ExactPosterior(const GaussianMixture& prior, const Matrix& a, double sigma_y,
                               const Vector& y);

Vector Sample(const GaussianMixture& mix, RandomStream& rng);

}  // namespace tiltsearch
