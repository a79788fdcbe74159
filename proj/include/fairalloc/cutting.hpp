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

/// One row per cutting iteration.  Objective cuts record the separation
/// value g(x_t, P_{t+1}) = inner value - level; chance cuts record the
/// worst-case chance margin (mass - theta), also negative beyond -eps/2.
struct CutRecord {
    int iteration = 0;
    double master_level = 0.0;
    double separation_value = 0.0;
    bool distribution_added = false;
    double wall_time = 0.0;  // seconds since the solve started
};

struct CutLog {
    std::vector<CutRecord> records;

    void save_csv(const std::string& path) const;
};

struct SadrOptions {
    int max_iterations = 200;
    // optional warm start: reuse a previous solve's cut collection
    std::vector<DiscreteDistribution> initial_cuts;
};

struct SadrResult {
    SolveReport report;
    CutLog log;
};

/// Cutting-surface driver: alternates restricted master solves with two
/// separations at x_t.  First the chance constraint is separated over the
/// whole moment set (it must hold under every distribution the ambiguity
/// admits, so a distribution whose satisfaction mass falls below
/// theta - eps/2 becomes a cut); then the objective separation
/// min_p g(x_t, p) runs, stopping when g >= -eps/2, which certifies an
/// eps-optimal allocation.  The collection starts from the uniform
/// distribution (restored into the moment set if needed) so the first
/// master is bounded; a separating distribution within total variation
/// 1e-8 of an existing cut stops the loop with the current certificate.
/// The reported objective is the final master level.
SadrResult solve_sadr(const ResourceInstance& instance, const ScenarioSet& scenarios,
                      const MomentAmbiguity& set, const FairnessParams& params, std::uint64_t seed,
                      const SadrOptions& options = {});

/// Re-runs the separation at the reported allocation with an independent
/// seed; ok iff the refreshed g lies above -eps and the chance constraint
/// holds over the moment set within eps.
std::pair<double, bool> verify_certificate(const SolveReport& report,
                                           const ResourceInstance& instance,
                                           const ScenarioSet& scenarios, const MomentAmbiguity& set,
                                           const FairnessParams& params, std::uint64_t fresh_seed);

}  // namespace fairalloc
