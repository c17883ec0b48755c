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

// Independent reference computations for tests. Nothing here calls the
// library's closed forms: densities are summed directly in long double,
// derivatives come from central differences, and integrals from grids.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tiltsearch/gmm.hpp"
#include "tiltsearch/linalg.hpp"
#include "tiltsearch/random.hpp"

namespace tiltsearch::oracle {

// Gaussian density by explicit inverse and determinant, in long double.
inline long double GaussianPdf(const Vector& x, const Vector& mean, const Matrix& cov) {
  const Eigen::MatrixXd inv = Eigen::MatrixXd(cov).inverse();
  const Eigen::VectorXd r = x - mean;
  const long double quad = r.dot(inv * r);
  const long double det = Eigen::MatrixXd(cov).determinant();
  const long double norm = std::pow(2.0L * std::numbers::pi_v<long double>, x.size()) * det;
  return std::exp(-0.5L * quad) / std::sqrt(norm);
}

inline long double MixturePdf(const GaussianMixture& mix, const Vector& x) {
  long double sum = 0.0L;
  for (int k = 0; k < mix.size(); ++k) {
    sum += mix.weight(k) * GaussianPdf(x, mix.mean(k), mix.covariance(k));
  }
  return sum;
}

// Central-difference Jacobian, one column per input coordinate.
inline Eigen::MatrixXd Jacobian(const std::function<Eigen::VectorXd(const Vector&)>& f,
                                const Vector& x, double h = 1e-5) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

inline Eigen::VectorXd Gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                double h = 1e-5) {
  return Jacobian([&](const Vector& p) { return Eigen::VectorXd::Constant(1, f(p)); }, x, h)
      .row(0)
      .transpose();
}

// Random mixture with well-conditioned covariances.
inline GaussianMixture RandomMixture(RandomStream& rng, int d, int k, double spread = 2.0) {
  std::vector<double> w;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    w.push_back(0.2 + rng.Uniform());
    total += w.back();
    means.push_back(spread * rng.StandardNormal(d));
    Matrix l(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) l(r, c) = 0.5 * rng.Normal();
    }
    covs.push_back(l * l.transpose() + 0.1 * Matrix::Identity(d, d));
  }
  for (double& x : w) x /= total;
  return GaussianMixture(std::move(w), std::move(means), std::move(covs));
}

// Midpoint-rule integral of f over [lo, hi] with n cells.
inline long double Integrate1d(const std::function<long double(double)>& f, double lo, double hi,
                               int n) {
  const double dx = (hi - lo) / n;
  long double sum = 0.0L;
  for (int i = 0; i < n; ++i) sum += f(lo + (i + 0.5) * dx);
  return sum * dx;
}

inline Vector Vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Matrix Mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix out(rows, cols);
  auto it = v.begin();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = *it++;
  }
  return out;
}

}  // namespace tiltsearch::oracle
