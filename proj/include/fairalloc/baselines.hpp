// Copyright 2026 The fairalloc Authors
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

#include "fairalloc/master.hpp"

namespace fairalloc {

struct BaselineOptions {
    // Uses 1 - theta as the chance mass threshold in the expected-value
    // model, replicating its printed form; everywhere else the threshold
    // is theta itself.
    bool ev_theta_complement = false;
};

/// Expected-value model: maximize F(x, mean requirement matrix) under
/// chance constraints evaluated against truth_p (uniform by default).
SolveReport solve_ev(const ResourceInstance& instance, const ScenarioSet& scenarios,
                     const DiscreteDistribution& truth_p, const FairnessParams& params,
                     std::uint64_t seed, const BaselineOptions& options = {});

/// Robust model: maximize min_w F(x, xi^w) subject to every scenario's
/// capacity rows (worst case in objective and constraints).
SolveReport solve_robust(const ResourceInstance& instance, const ScenarioSet& scenarios,
                         const FairnessParams& params, std::uint64_t seed);

/// Sample-average model: maximize (1/|Omega|) sum_w F(x, xi^w) with the
/// chance machinery at uniform weights.
SolveReport solve_saa(const ResourceInstance& instance, const ScenarioSet& scenarios,
                      const FairnessParams& params, std::uint64_t seed);

/// Deterministic model: maximize F against a fixed requirement matrix
/// subject to its capacity rows.
SolveReport solve_fds(const ResourceInstance& instance, const Matrix& requirements,
                      const FairnessParams& params, std::uint64_t seed);

/// Expected leftover capacity per resource under truth_p, clamped at zero
/// per scenario before averaging.
Vector leftovers(const SolveReport& report, const ScenarioSet& scenarios,
                 const ResourceInstance& instance, const DiscreteDistribution& truth_p);

}  // namespace fairalloc
