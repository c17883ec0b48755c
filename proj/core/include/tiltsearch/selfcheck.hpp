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

#include <ostream>

namespace tiltsearch {

// Small oracle battery: finite-difference score, Hessian and reward-gradient
// checks, the Tweedie covariance identity, conjugate posterior against a
// grid, and categorical resampling frequencies. One line per check on `out`;
// true when all pass.
bool RunSelfChecks(std::ostream& out);

}  // namespace tiltsearch
