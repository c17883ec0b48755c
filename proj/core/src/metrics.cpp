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

#include "tiltsearch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace tiltsearch {

double Psnr(const Vector& x_hat, const Vector& x0_true, double peak, double cap) {
  if (x_hat.size() != x0_true.size() || x_hat.size() == 0) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double mse = (x_hat - x0_true).squaredNorm() / static_cast<double>(x_hat.size());
  if (mse < 1e-12) return cap;
  return std::min(cap, 10.0 * std::log10(peak * peak / mse));
}

double PeakFromPrior(const GaussianMixture& prior) {
  double mean_norm = 0.0;
  double eig = 0.0;
  for (int k = 0; k < prior.size(); ++k) {
    mean_norm = std::max(mean_norm, prior.mean(k).norm());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(prior.covariance(k), Eigen::EigenvaluesOnly);
    eig = std::max(eig, solver.eigenvalues().maxCoeff());
  }
  return mean_norm + 3.0 * std::sqrt(eig);
}

void RunningStats::Add(double value) {
  if (n_ == 0) shift_ = value;
  const double x = value - shift_;
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

std::vector<SummaryRow> Aggregate(const std::vector<TrialResult>& results,
                                  const std::vector<GroupKey>& keys) {
  if (results.empty()) throw std::invalid_argument("aggregate: no results");
  auto has = [&](GroupKey k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  const bool by_strategy = has(GroupKey::kStrategy);
  const bool by_particles = has(GroupKey::kParticles);
  const bool by_base = has(GroupKey::kBase);

  using Key = std::tuple<int, int, int>;
  // Sort values within a key first so the fold, and thus every output bit,
  // is independent of input order.
  std::map<Key, std::vector<double>> buckets;
  for (const TrialResult& r : results) {
    if (r.error) continue;
    const Key key{by_strategy ? static_cast<int>(r.strategy) : -1, by_particles ? r.particles : -1,
                  by_base ? r.base : -1};
    buckets[key].push_back(r.psnr);
  }
  std::vector<SummaryRow> rows;
  for (auto& [key, values] : buckets) {
    std::sort(values.begin(), values.end());
    RunningStats stats;
    for (double v : values) stats.Add(v);
    SummaryRow row;
    if (by_strategy) row.strategy = static_cast<Strategy>(std::get<0>(key));
    if (by_particles) row.particles = std::get<1>(key);
    if (by_base) row.base = std::get<2>(key);
    row.count = stats.count();
    row.mean = stats.mean();
    row.stddev = stats.stddev();
    row.stderr_mean = row.stddev / std::sqrt(static_cast<double>(row.count));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tiltsearch
