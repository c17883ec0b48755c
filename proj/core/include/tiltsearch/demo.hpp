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

#include <filesystem>
#include <string>
#include <vector>

#include "tiltsearch/config.hpp"
#include "tiltsearch/forward_model.hpp"
#include "tiltsearch/linalg.hpp"

namespace tiltsearch {

struct DemoCloud {
  std::string label;  // "prior", "dps" or "rfjs_B<b>"
  int base = 0;       // 0 for prior and dps
  std::vector<Vector> points;        // every repetition's particles, in order
  std::vector<double> rep_distances;  // per repetition, mean ||x - x0||
};

struct DemoResult {
  TrialSpec trial;
  std::vector<DemoCloud> clouds;
};

// Particle clouds for one trial: prior samples, DPS-only particles (no
// resampling, no reward guidance), and RFJS with N = demo_particles at each
// demo base. Repetition r of every cloud uses the same particle streams.
// Requires a linear side model in `config`.
DemoResult RunSideInfoDemo(const ExperimentConfig& config);

// Same, for a caller-built trial. The side model may be of either kind.
DemoResult RunSideInfoDemo(const ExperimentConfig& config, const TrialSpec& trial);

// Writes points_<label>.csv (x1,x2,label) per cloud and demo_summary.csv
// (label,B,rep,mean_distance). Only 2D clouds can be written.
void WriteDemo(const DemoResult& result, const std::filesystem::path& dir);

}  // namespace tiltsearch
