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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/gmm.hpp"
#include "tiltsearch/sampler.hpp"
#include "tiltsearch/schedule.hpp"
#include "tiltsearch/search.hpp"

namespace tiltsearch {

// Parse or validation failure. `line` is 0 for validation errors; `field`
// names the offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line, std::string field);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class RewardKind { kNegQuadratic, kCosine };

struct ExperimentConfig {
  // Schedule.
  int schedule_steps = 256;
  double beta_min = 1e-4;
  double beta_max = 0.08;

  // Prior: five equal components on a ring of radius 2.
  std::vector<double> prior_weights;
  std::vector<std::vector<double>> prior_means;
  std::vector<std::vector<std::vector<double>>> prior_covariances;

  // Forward model.
  int meas_dim = 1;
  int side_dim = 1;
  double operator_norm = 1.0;
  double side_norm = 1.0;
  double sigma_y = 0.1;
  double sigma_s = 0.1;
  SideKind side_kind = SideKind::kMlp;
  std::vector<int> mlp_hidden = {32, 32};
  int mlp_output = 8;

  // Reward and guidance.
  RewardKind reward_kind = RewardKind::kCosine;
  double tau = 1.0;
  GuidanceConfig guidance;

  // Search grid.
  std::vector<Strategy> strategies = {Strategy::kRecursiveForkJoin, Strategy::kGreedySearch};
  std::vector<int> particles = {8};
  std::vector<int> bases = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  ResampleMode resample_mode = ResampleMode::kGreedy;
  CategoricalWeights categorical_weights = CategoricalWeights::kIncremental;

  // Protocol.
  int trial_count = 1000;
  int repetitions = 8;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  std::optional<double> psnr_peak;  // derived from the prior when unset
  double psnr_cap = 100.0;

  // Side-information demo.
  std::vector<int> demo_bases = {64, 16, 4};
  int demo_particles = 32;
  int demo_repetitions = 200;
  int demo_trial = 0;

  ExperimentConfig();

  // Throws ConfigError naming the first invalid field.
  void Validate() const;

  GaussianMixture Prior() const;
  DiffusionSchedule Schedule() const;
  TrialOptions Trial() const;
  double Peak() const;
  SearchConfig Search(Strategy strategy, int n, int base) const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Flat `key = value` document. Values are JSON literals; bare words are read
// as strings, `#` starts a comment, and a value may continue over several
// lines while its brackets are open. Unknown or repeated keys are errors.
// The result is validated.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Every key, in a fixed order, with round-trippable number formatting.
std::string ToCanonical(const ExperimentConfig& config);

}  // namespace tiltsearch
