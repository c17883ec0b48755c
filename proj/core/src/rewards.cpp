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

#include "tiltsearch/rewards.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace tiltsearch {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kRuleOrder = 20;

// Full node/weight list of the 20-point Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const Rule& LegendreRule() {
  static const Rule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kRuleOrder>;
    Rule r;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
      if (x[i] != 0.0) {
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
      }
    }
    return r;
  }();
  return rule;
}

// Composite rule with `panels` equal panels on [-half, half]: nodes and log weights.
void CompositeRule(int panels, double half, std::vector<double>* nodes,
                   std::vector<double>* log_weights) {
  const Rule& rule = LegendreRule();
  nodes->clear();
  log_weights->clear();
  const double width = 2.0 * half / panels;
  for (int p = 0; p < panels; ++p) {
    const double center = -half + (p + 0.5) * width;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes->push_back(center + 0.5 * width * rule.nodes[i]);
      log_weights->push_back(std::log(0.5 * width * rule.weights[i]));
    }
  }
}

class LogAccumulator {
 public:
  void Add(double v) {
    if (v == kNegInf) return;
    if (v > hi_) {
      acc_ = acc_ * std::exp(hi_ - v) + 1.0;
      hi_ = v;
    } else {
      acc_ += std::exp(v - hi_);
    }
  }
  double Value() const { return acc_ == 0.0 ? kNegInf : hi_ + std::log(acc_); }

 private:
  double hi_ = kNegInf;
  double acc_ = 0.0;
};

// log E[exp(r/tau)] under one Gaussian component, in whitened coordinates and
// renormalized by the quadrature mass of the window.
double ComponentLogTilt(const Vector& mean, const Matrix& lower, const RewardSpec& spec,
                        const Vector& s, int panels, double half) {
  const int d = static_cast<int>(mean.size());
  std::vector<double> nodes;
  std::vector<double> log_w;
  CompositeRule(panels, half, &nodes, &log_w);
  const std::size_t n = nodes.size();
  LogAccumulator tilted;
  LogAccumulator mass;
  Vector z(d);
  auto visit = [&](double log_weight) {
    const double log_phi = -0.5 * (d * kLog2Pi + z.squaredNorm());
    const Vector x = mean + lower * z;
    const double lw = log_weight + log_phi;
    mass.Add(lw);
    tilted.Add(lw + Reward(spec, x, s) / spec.tau);
  };
  if (d == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      z[0] = nodes[i];
      visit(log_w[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        z[0] = nodes[i];
        z[1] = nodes[j];
        visit(log_w[i] + log_w[j]);
      }
    }
  }
  return tilted.Value() - mass.Value();
}

double CosineOf(const Vector& e, const Vector& s) {
  const double ne = e.norm();
  const double ns = s.norm();
  if (ne == 0.0 || ns == 0.0) return 0.0;
  return e.dot(s) / (ne * ns);
}

}  // namespace

RewardSpec RewardForSide(const SideInfoModel& side, double tau) {
  if (const auto* linear = std::get_if<LinearSide>(&side)) {
    return RewardSpec{NegQuadraticLinear{linear->b}, tau};
  }
  return RewardSpec{CosineMlp{std::get<MlpSide>(side).net}, tau};
}

double Reward(const RewardSpec& spec, const Vector& x0_hat, const Vector& s) {
  if (const auto* quad = std::get_if<NegQuadraticLinear>(&spec.kind)) {
    if (quad->b.cols() != x0_hat.size() || quad->b.rows() != s.size()) {
      throw std::invalid_argument("reward: shape mismatch");
    }
    return -(s - quad->b * x0_hat).squaredNorm();
  }
  const auto& cosine = std::get<CosineMlp>(spec.kind);
  const Vector e = cosine.net.Embed(x0_hat);
  if (e.size() != s.size()) throw std::invalid_argument("reward: embedding/side size mismatch");
  return CosineOf(e, s);
}

Vector RewardGradient(const RewardSpec& spec, const Vector& x0_hat, const Vector& s) {
  if (const auto* quad = std::get_if<NegQuadraticLinear>(&spec.kind)) {
    return 2.0 * quad->b.transpose() * (s - quad->b * x0_hat);
  }
  const auto& cosine = std::get<CosineMlp>(spec.kind);
  Matrix jac;
  const Vector e = cosine.net.EmbedWithJacobian(x0_hat, &jac);
  const double ne = e.norm();
  const double ns = s.norm();
  if (ne == 0.0 || ns == 0.0) return Vector::Zero(x0_hat.size());
  // d cos / d e = s / (|e||s|) - cos * e / |e|^2
  const Vector de = s / (ne * ns) - (e.dot(s) / (ne * ns)) * e / (ne * ne);
  return jac.transpose() * de;
}

double ValueHat(const RewardSpec& spec, const Vector& x0_hat_y, const Vector& s) {
  if (!(spec.tau > 0.0)) throw std::invalid_argument("value_hat: tau must be positive");
  return Reward(spec, x0_hat_y, s) / spec.tau;
}

std::vector<double> TiltWeights(std::span<const double> rewards, double tau) {
  if (rewards.empty()) throw std::invalid_argument("tilt_weights: empty reward list");
  if (!(tau > 0.0)) throw std::invalid_argument("tilt_weights: tau must be positive");
  double hi = kNegInf;
  for (double r : rewards) {
    if (!std::isfinite(r)) throw std::invalid_argument("tilt_weights: non-finite reward");
    hi = std::max(hi, r);
  }
  std::vector<double> w(rewards.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    w[i] = std::exp((rewards[i] - hi) / tau);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

double LogExpectedTilt(const GaussianMixture& mix, const RewardSpec& spec, const Vector& s,
                       const QuadratureOptions& options) {
  if (mix.dim() > 2) throw std::invalid_argument("quadrature: only d <= 2 is supported");
  if (!(spec.tau > 0.0)) throw std::invalid_argument("quadrature: tau must be positive");
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int panels = options.initial_panels; panels <= options.max_panels; panels *= 2) {
    LogAccumulator total;
    for (int k = 0; k < mix.size(); ++k) {
      if (mix.weight(k) == 0.0) continue;
      const Matrix lower = mix.factor(k).matrixL();
      total.Add(mix.log_weight(k) + ComponentLogTilt(mix.mean(k), lower, spec, s, panels,
                                                     options.window_sigmas));
    }
    const double value = total.Value();
    if (std::abs(value - previous) < options.tolerance) return value;
    previous = value;
  }
  throw QuadratureError("quadrature: no convergence within " + std::to_string(options.max_panels) +
                        " panels per axis (last estimate " + std::to_string(previous) + ")");
}

double ValueExactQuadrature(const DiffusionPrior& dp, int t, const Vector& x_t,
                            const RewardSpec& spec, const Vector& s,
                            const LinearMeasurement& measurement, const Vector& y,
                            const QuadratureOptions& options) {
  if (dp.dim() > 2) throw std::invalid_argument("quadrature: only d <= 2 is supported");
  const GaussianMixture conditional = ConditionalPosterior(dp, t, x_t).AsMixture();
  const GaussianMixture posterior =
      ExactPosterior(conditional, measurement.a, measurement.sigma_y, y);
  return LogExpectedTilt(posterior, spec, s, options);
}

}  // namespace tiltsearch
