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

#include "tiltsearch/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tiltsearch {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double LogSumExp(const double* v, int n) {
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) hi = std::max(hi, v[i]);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(v[i] - hi);
  return hi + std::log(acc);
}

Matrix Symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void CheckDim(const GaussianMixture& mix, const Vector& x) {
  if (x.size() != mix.dim()) {
    throw std::invalid_argument("gmm: point has dimension " + std::to_string(x.size()) +
                                ", mixture has " + std::to_string(mix.dim()));
  }
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Vector> means,
                                 std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  const std::size_t k = weights_.size();
  if (k == 0) throw std::invalid_argument("gmm: mixture needs at least one component");
  if (means_.size() != k || covariances_.size() != k) {
    throw std::invalid_argument("gmm: weights, means and covariances differ in length");
  }
  dim_ = static_cast<int>(means_.front().size());
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("gmm: unsupported dimension");

  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("gmm: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("gmm: weights must sum to 1");
  for (double& w : weights_) w /= total;

  log_weights_.reserve(k);
  factors_.reserve(k);
  precisions_.reserve(k);
  log_normalizers_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Matrix& cov = covariances_[i];
    if (means_[i].size() != dim_ || cov.rows() != dim_ || cov.cols() != dim_) {
      throw std::invalid_argument("gmm: component " + std::to_string(i) + " has wrong shape");
    }
    if (!cov.isApprox(cov.transpose(), 1e-10) && (cov - cov.transpose()).norm() > 1e-12) {
      throw std::invalid_argument("gmm: covariance " + std::to_string(i) + " is not symmetric");
    }
    Cholesky llt(cov);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("gmm: covariance " + std::to_string(i) +
                                  " is not positive definite");
    }
    const Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    if (!std::isfinite(log_det)) {
      throw std::invalid_argument("gmm: covariance " + std::to_string(i) + " is degenerate");
    }
    log_weights_.push_back(weights_[i] > 0.0 ? std::log(weights_[i])
                                             : -std::numeric_limits<double>::infinity());
    precisions_.push_back(Symmetrized(llt.solve(Matrix::Identity(dim_, dim_))));
    log_normalizers_.push_back(-0.5 * (dim_ * kLog2Pi + log_det));
    factors_.push_back(std::move(llt));
  }
}

GaussianMixture GaussianMixture::Single(const Vector& mean, const Matrix& covariance) {
  return GaussianMixture({1.0}, {mean}, {covariance});
}

Vector GaussianMixture::Mean() const {
  Vector m = Vector::Zero(dim_);
  for (int k = 0; k < size(); ++k) m += weights_[k] * means_[k];
  return m;
}

Matrix GaussianMixture::Covariance() const {
  const Vector m = Mean();
  Matrix c = Matrix::Zero(dim_, dim_);
  for (int k = 0; k < size(); ++k) {
    const Vector d = means_[k] - m;
    c += weights_[k] * (covariances_[k] + d * d.transpose());
  }
  return c;
}

LocalGeometry Evaluate(const GaussianMixture& mix, const Vector& x, bool with_hessian) {
  CheckDim(mix, x);
  const int k_count = mix.size();
  const int d = mix.dim();
  std::vector<double> logp(static_cast<std::size_t>(k_count));
  std::vector<Vector> pulls(static_cast<std::size_t>(k_count));  // Sigma_k^{-1} (x - mu_k)
  for (int k = 0; k < k_count; ++k) {
    const Vector diff = x - mix.mean(k);
    pulls[k] = mix.factor(k).solve(diff);
    logp[k] = mix.log_weight(k) + mix.log_normalizer(k) - 0.5 * diff.dot(pulls[k]);
  }
  LocalGeometry out;
  out.log_density = LogSumExp(logp.data(), k_count);
  out.score = Vector::Zero(d);
  if (with_hessian) out.hessian = Matrix::Zero(d, d);
  for (int k = 0; k < k_count; ++k) {
    const double r = std::exp(logp[k] - out.log_density);
    if (r == 0.0) continue;
    out.score -= r * pulls[k];
    if (with_hessian) out.hessian += r * (pulls[k] * pulls[k].transpose() - mix.precision(k));
  }
  if (with_hessian) out.hessian = Symmetrized(out.hessian - out.score * out.score.transpose());
  return out;
}

double LogDensity(const GaussianMixture& mix, const Vector& x) {
  return Evaluate(mix, x, false).log_density;
}

Vector Score(const GaussianMixture& mix, const Vector& x) { return Evaluate(mix, x, false).score; }

Matrix ScoreHessian(const GaussianMixture& mix, const Vector& x) {
  return Evaluate(mix, x, true).hessian;
}

std::vector<double> Responsibilities(const GaussianMixture& mix, const Vector& x) {
  CheckDim(mix, x);
  std::vector<double> logp(static_cast<std::size_t>(mix.size()));
  for (int k = 0; k < mix.size(); ++k) {
    const Vector diff = x - mix.mean(k);
    logp[k] = mix.log_weight(k) + mix.log_normalizer(k) -
              0.5 * diff.dot(mix.factor(k).solve(diff));
  }
  const double hi = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double& v : logp) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : logp) v /= total;
  return logp;
}

GaussianMixture DiffusedMarginal(const GaussianMixture& prior, const DiffusionSchedule& schedule,
                                 int t) {
  schedule.CheckStep(t);
  const double abar = schedule.alpha_bar(t);
  const double root = std::sqrt(abar);
  const int d = prior.dim();
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int k = 0; k < prior.size(); ++k) {
    means.push_back(root * prior.mean(k));
    covs.push_back(abar * prior.covariance(k) + (1.0 - abar) * Matrix::Identity(d, d));
  }
  return GaussianMixture(prior.weights(), std::move(means), std::move(covs));
}

DiffusionPrior::DiffusionPrior(GaussianMixture prior, DiffusionSchedule schedule)
    : schedule_(std::move(schedule)) {
  marginals_.reserve(static_cast<std::size_t>(schedule_.steps()) + 1);
  marginals_.push_back(std::move(prior));
  for (int t = 1; t <= schedule_.steps(); ++t) {
    marginals_.push_back(DiffusedMarginal(marginals_.front(), schedule_, t));
  }
}

const GaussianMixture& DiffusionPrior::marginal(int t) const {
  schedule_.CheckStep(t, 0);
  return marginals_[static_cast<std::size_t>(t)];
}

Vector TweedieDenoise(const DiffusionPrior& dp, int t, const Vector& x_t) {
  const GaussianMixture& marginal = dp.marginal(t);
  if (t == 0) {
    CheckDim(marginal, x_t);
    return x_t;
  }
  const double abar = dp.alpha_bar(t);
  return (x_t + (1.0 - abar) * Score(marginal, x_t)) / std::sqrt(abar);
}

Denoised DenoiseWithJacobian(const DiffusionPrior& dp, int t, const Vector& x_t) {
  const GaussianMixture& marginal = dp.marginal(t);
  const int d = marginal.dim();
  Denoised out;
  if (t == 0) {
    CheckDim(marginal, x_t);
    out.x0_hat = x_t;
    out.jacobian = Matrix::Identity(d, d);
    out.score = Score(marginal, x_t);
    return out;
  }
  const double abar = dp.alpha_bar(t);
  const double root = std::sqrt(abar);
  LocalGeometry geo = Evaluate(marginal, x_t, true);
  out.x0_hat = (x_t + (1.0 - abar) * geo.score) / root;
  out.jacobian = (Matrix::Identity(d, d) + (1.0 - abar) * geo.hessian) / root;
  out.score = std::move(geo.score);
  return out;
}

Vector ConditionalMixture::Mean() const {
  Vector m = Vector::Zero(means.front().size());
  for (std::size_t k = 0; k < means.size(); ++k) m += responsibilities[k] * means[k];
  return m;
}

Matrix ConditionalMixture::Covariance() const {
  const Vector m = Mean();
  const auto d = m.size();
  Matrix c = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < means.size(); ++k) {
    const Vector diff = means[k] - m;
    c += responsibilities[k] * (covariances[k] + diff * diff.transpose());
  }
  return c;
}

GaussianMixture ConditionalMixture::AsMixture() const {
  return GaussianMixture(responsibilities, means, covariances);
}

ConditionalMixture ConditionalPosterior(const DiffusionPrior& dp, int t, const Vector& x_t) {
  dp.schedule().CheckStep(t);
  const GaussianMixture& prior = dp.prior();
  const GaussianMixture& marginal = dp.marginal(t);
  CheckDim(prior, x_t);
  const double abar = dp.alpha_bar(t);
  const double root = std::sqrt(abar);

  ConditionalMixture out;
  out.responsibilities = Responsibilities(marginal, x_t);
  for (int k = 0; k < prior.size(); ++k) {
    const Matrix& sigma = prior.covariance(k);
    // Gain Sigma_k S_k^{-1}, with S_k the diffused covariance (symmetric solve).
    const Matrix gain = marginal.factor(k).solve(sigma).transpose();
    out.means.push_back(prior.mean(k) + root * gain * (x_t - root * prior.mean(k)));
    out.covariances.push_back(Symmetrized(sigma - abar * gain * sigma));
  }
  return out;
}

GaussianMixture ExactPosterior(const GaussianMixture& prior, const Matrix& a, double sigma_y,
                               const Vector& y) {
  if (!(sigma_y > 0.0)) throw std::invalid_argument("exact_posterior: sigma_y must be positive");
  if (a.cols() != prior.dim() || a.rows() != y.size()) {
    throw std::invalid_argument("exact_posterior: operator shape does not match prior/y");
  }
  const int m = static_cast<int>(a.rows());
  std::vector<double> log_w;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int k = 0; k < prior.size(); ++k) {
    const Matrix& sigma = prior.covariance(k);
    const Matrix a_sigma = a * sigma;
    const Matrix innovation =
        Symmetrized(a_sigma * a.transpose() + sigma_y * sigma_y * Matrix::Identity(m, m));
    Cholesky llt(innovation);
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("exact_posterior: singular information matrix in component " +
                              std::to_string(k));
    }
    const Vector resid = y - a * prior.mean(k);
    const Matrix gain = llt.solve(a_sigma).transpose();  // Sigma A^T S^{-1}
    const Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    log_w.push_back(prior.log_weight(k) - 0.5 * (m * kLog2Pi + log_det) -
                    0.5 * resid.dot(llt.solve(resid)));
    means.push_back(prior.mean(k) + gain * resid);
    covs.push_back(Symmetrized(sigma - gain * a_sigma));
  }
  const double lse = LogSumExp(log_w.data(), static_cast<int>(log_w.size()));
  std::vector<double> weights;
  for (double v : log_w) weights.push_back(std::exp(v - lse));
  return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
}

Vector Sample(const GaussianMixture& mix, RandomStream& rng) {
  const double u = rng.Uniform();
  int chosen = mix.size() - 1;
  double acc = 0.0;
  for (int k = 0; k < mix.size(); ++k) {
    acc += mix.weight(k);
    if (u < acc) {
      chosen = k;
      break;
    }
  }
  while (mix.weight(chosen) == 0.0) --chosen;  // u landed in a rounding gap at the top
  const Vector z = rng.StandardNormal(mix.dim());
  return mix.mean(chosen) + mix.factor(chosen).matrixL() * z;
}

}  // namespace tiltsearch
