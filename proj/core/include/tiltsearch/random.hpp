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
#include <initializer_list>
#include <random>

#include "tiltsearch/linalg.hpp"

namespace tiltsearch {

// Stable 64-bit mix of a sequence of words (splitmix64 finalizer chained over
// the inputs). Used for every derived seed so results never depend on thread
// scheduling or on the standard library's seed_seq.
std::uint64_t MixSeed(std::initializer_list<std::uint64_t> words);

// A seeded random stream owning its engine and normal sampler state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }
  Vector StandardNormal(int dim);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tiltsearch
