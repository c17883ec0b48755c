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
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "tiltsearch/gmm.hpp"
#include "tiltsearch/linalg.hpp"
#include "tiltsearch/random.hpp"

namespace tiltsearch {

// Raised when a trial cannot be materialized (e.g. no orthogonal complement).
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearMeasurement {
  Matrix a;
  double sigma_y = 0.0;
};

// Small feed-forward net: affine layers with tanh between them, affine output.
class MlpNetwork {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  MlpNetwork() = default;
  // Throws std::invalid_argument if consecutive layer shapes do not chain.
  explicit MlpNetwork(std::vector<Layer> layers);

  // Gaussian weights and biases, both scaled by 1/sqrt(fan_in).
  static MlpNetwork Random(RandomStream& rng, int input, const std::vector<int>& hidden,
                           int output);

  int input_dim() const;
  int output_dim() const;
  const std::vector<Layer>& layers() const { return layers_; }

  // Forward pass. Throws std::invalid_argument on input-size mismatch.
  Vector Embed(const Vector& x) const;
  // Forward pass plus the Jacobian d(output)/d(input).
  Vector EmbedWithJacobian(const Vector& x, Matrix* jacobian) const;

 private:
  std::vector<Layer> layers_;
};

inline Vector MlpEmbed(const MlpNetwork& net, const Vector& x) { return net.Embed(x); }

struct LinearSide {
  Matrix b;
  double sigma_s = 0.0;
};

struct MlpSide {
  MlpNetwork net;
  double sigma_s = 0.0;
};

using SideInfoModel = std::variant<LinearSide, MlpSide>;

enum class SideKind { kLinear, kMlp };

// Noiseless side map B x or r_theta(x).
Vector SideMap(const SideInfoModel& side, const Vector& x);

struct TrialOptions {
  int meas_dim = 1;
  int side_dim = 1;  // linear side rows; the MLP output width otherwise
  double operator_norm = 1.0;
  double side_norm = 1.0;
  double sigma_y = 0.1;
  double sigma_s = 0.1;
  SideKind side_kind = SideKind::kLinear;
  std::vector<int> mlp_hidden = {32, 32};
};

struct TrialSpec {
  std::uint64_t seed = 0;
  Vector x0_true;
  LinearMeasurement measurement;
  Vector y;
  SideInfoModel side;
  Vector s;
};

// Gaussian matrix rescaled to Frobenius norm `norm`.
Matrix RandomOperator(RandomStream& rng, int rows, int cols, double norm);

// Random q x d matrix whose rows are orthogonal to the rows of A, scaled to
// Frobenius norm `norm`. Throws GenerationError when A's rows span R^d.
Matrix MakeOrthogonalSide(RandomStream& rng, const Vector& x0, const Matrix& a, int rows,
                          double norm);

Vector Measure(const LinearMeasurement& model, const Vector& x0, RandomStream& rng);

// Everything is drawn from streams derived from `seed`, so the same seed and
// options always give a bitwise-identical trial.
TrialSpec MakeTrial(std::uint64_t seed, const GaussianMixture& prior, const TrialOptions& options);

// Multi-line human-readable dump for logs and `run` output.
std::string Describe(const TrialSpec& trial);

}  // namespace tiltsearch
