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

#include "tiltsearch/forward_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace tiltsearch {
namespace {

// Independent sub-streams of one trial seed.
enum StreamTag : std::uint64_t {
  kGroundTruth = 1,
  kOperator = 2,
  kSideModel = 3,
  kMeasNoise = 4,
  kSideNoise = 5,
};

using Activation = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 128, 1>;

}  // namespace

MlpNetwork::MlpNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("mlp: network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    if (layer.bias.size() != layer.weight.rows()) {
      throw std::invalid_argument("mlp: bias size mismatch in layer " + std::to_string(i));
    }
    if (layer.weight.rows() > 128) throw std::invalid_argument("mlp: layer wider than 128");
    if (i > 0 && layer.weight.cols() != layers_[i - 1].weight.rows()) {
      throw std::invalid_argument("mlp: layer " + std::to_string(i) + " does not chain");
    }
  }
  if (output_dim() > kMaxDim || input_dim() > kMaxDim) {
    throw std::invalid_argument("mlp: input/output wider than kMaxDim");
  }
}

MlpNetwork MlpNetwork::Random(RandomStream& rng, int input, const std::vector<int>& hidden,
                              int output) {
  std::vector<Layer> layers;
  int fan_in = input;
  auto add = [&](int width) {
    Layer layer{Eigen::MatrixXd(width, fan_in), Eigen::VectorXd::Zero(width)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < width; ++r) layer.weight(r, c) = scale * rng.Normal();
    }
    // Nonzero biases keep the embedding from vanishing at the origin, where
    // the cosine reward would otherwise be discontinuous.
    for (int r = 0; r < width; ++r) layer.bias[r] = scale * rng.Normal();
    layers.push_back(std::move(layer));
    fan_in = width;
  };
  for (int width : hidden) add(width);
  add(output);
  return MlpNetwork(std::move(layers));
}

int MlpNetwork::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int MlpNetwork::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

Vector MlpNetwork::Embed(const Vector& x) const { return EmbedWithJacobian(x, nullptr); }

Vector MlpNetwork::EmbedWithJacobian(const Vector& x, Matrix* jacobian) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("mlp: input has size " + std::to_string(x.size()) +
                                ", network expects " + std::to_string(input_dim()));
  }
  Activation h = x;
  Eigen::MatrixXd jac;
  if (jacobian) jac = Eigen::MatrixXd::Identity(x.size(), x.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    Activation z = layer.weight * h + layer.bias;
    if (jacobian) jac = layer.weight * jac;
    if (i + 1 < layers_.size()) {
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        z[j] = std::tanh(z[j]);
        if (jacobian) jac.row(j) *= 1.0 - z[j] * z[j];
      }
    }
    h = std::move(z);
  }
  if (jacobian) *jacobian = jac;
  return h;
}

Vector SideMap(const SideInfoModel& side, const Vector& x) {
  if (const auto* linear = std::get_if<LinearSide>(&side)) {
    if (linear->b.cols() != x.size()) throw std::invalid_argument("side map: shape mismatch");
    return linear->b * x;
  }
  return std::get<MlpSide>(side).net.Embed(x);
}

Matrix RandomOperator(RandomStream& rng, int rows, int cols, double norm) {
  if (!(norm > 0.0)) throw std::invalid_argument("random_operator: norm must be positive");
  if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim) {
    throw std::invalid_argument("random_operator: bad shape");
  }
  Matrix m(rows, cols);
  double frob = 0.0;
  do {
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = rng.Normal();
    }
    frob = m.norm();
  } while (frob == 0.0);
  return m * (norm / frob);
}

Matrix MakeOrthogonalSide(RandomStream& rng, const Vector& x0, const Matrix& a, int rows,
                          double norm) {
  const int d = static_cast<int>(a.cols());
  if (d < 2) throw std::invalid_argument("orthogonal_side: need d >= 2");
  if (x0.size() != d) throw std::invalid_argument("orthogonal_side: x0 does not match A");
  if (x0.squaredNorm() == 0.0) throw std::invalid_argument("orthogonal_side: x0 must be nonzero");
  if (!(norm > 0.0)) throw std::invalid_argument("orthogonal_side: norm must be positive");

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const int rank = static_cast<int>(svd.rank());
  if (rank >= d) {
    throw GenerationError("orthogonal_side: rows of A span R^" + std::to_string(d) +
                          ", no orthogonal complement");
  }
  const Matrix complement = svd.matrixV().rightCols(d - rank);  // d x (d - rank)
  const Matrix projector = complement * complement.transpose();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Matrix g = RandomOperator(rng, rows, d, 1.0);
    Matrix b = g * projector;
    // Strip the residual row-space component left by rounding in the projector.
    b -= (b * a.transpose()) * (a * a.transpose()).completeOrthogonalDecomposition().pseudoInverse() * a;
    const double frob = b.norm();
    if (frob > 1e-8) return b * (norm / frob);
  }
  throw GenerationError("orthogonal_side: projection kept vanishing");
}

Vector Measure(const LinearMeasurement& model, const Vector& x0, RandomStream& rng) {
  if (model.a.cols() != x0.size()) throw std::invalid_argument("measure: shape mismatch");
  Vector y = model.a * x0;
  if (model.sigma_y != 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += model.sigma_y * rng.Normal();
  }
  return y;
}

TrialSpec MakeTrial(std::uint64_t seed, const GaussianMixture& prior, const TrialOptions& options) {
  if (options.sigma_y < 0.0 || options.sigma_s < 0.0) {
    throw std::invalid_argument("make_trial: noise levels must be nonnegative");
  }
  const int d = prior.dim();
  TrialSpec trial;
  trial.seed = seed;

  RandomStream truth_rng(MixSeed({seed, kGroundTruth}));
  trial.x0_true = Sample(prior, truth_rng);

  RandomStream op_rng(MixSeed({seed, kOperator}));
  trial.measurement.a = RandomOperator(op_rng, options.meas_dim, d, options.operator_norm);
  trial.measurement.sigma_y = options.sigma_y;

  RandomStream side_rng(MixSeed({seed, kSideModel}));
  if (options.side_kind == SideKind::kLinear) {
    trial.side = LinearSide{MakeOrthogonalSide(side_rng, trial.x0_true, trial.measurement.a,
                                               options.side_dim, options.side_norm),
                            options.sigma_s};
  } else {
    trial.side = MlpSide{MlpNetwork::Random(side_rng, d, options.mlp_hidden, options.side_dim),
                         options.sigma_s};
  }

  RandomStream meas_rng(MixSeed({seed, kMeasNoise}));
  trial.y = Measure(trial.measurement, trial.x0_true, meas_rng);

  RandomStream side_noise(MixSeed({seed, kSideNoise}));
  trial.s = SideMap(trial.side, trial.x0_true);
  if (options.sigma_s != 0.0) {
    for (Eigen::Index i = 0; i < trial.s.size(); ++i) trial.s[i] += options.sigma_s * side_noise.Normal();
  }
  return trial;
}

std::string Describe(const TrialSpec& trial) {
  const Eigen::IOFormat row(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", "; ", "", "", "[", "]");
  std::ostringstream os;
  os << "trial seed: " << trial.seed << '\n';
  os << "x0_true: " << trial.x0_true.transpose().format(row) << '\n';
  os << "A: " << trial.measurement.a.format(row) << "  sigma_y: " << trial.measurement.sigma_y
     << '\n';
  os << "y: " << trial.y.transpose().format(row) << '\n';
  if (const auto* linear = std::get_if<LinearSide>(&trial.side)) {
    os << "side: linear B: " << linear->b.format(row) << "  sigma_s: " << linear->sigma_s << '\n';
  } else {
    const auto& mlp = std::get<MlpSide>(trial.side);
    os << "side: mlp layers:";
    for (const auto& layer : mlp.net.layers()) os << ' ' << layer.weight.cols() << "->" << layer.weight.rows();
    os << "  sigma_s: " << mlp.sigma_s << '\n';
  }
  os << "s: " << trial.s.transpose().format(row) << '\n';
  return os.str();
}

}  // namespace tiltsearch
