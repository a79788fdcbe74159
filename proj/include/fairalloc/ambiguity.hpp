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

#include "fairalloc/scenarios.hpp"
#include "fairalloc/types.hpp"

namespace fairalloc {

/// Mean-interval and variance-cap constraints per requirement entry; the
/// set of distributions p over a scenario set with
///   mean_lower_ij <= sum_w p^w r_ij^w <= mean_upper_ij
///   sum_w p^w (r_ij^w)^2 - (sum_w p^w r_ij^w)^2 <= variance_upper_ij.
struct MomentAmbiguity {
    Matrix mean_lower;      // m x d
    Matrix mean_upper;      // m x d
    Matrix variance_upper;  // m x d

    Eigen::Index num_resources() const { return mean_lower.rows(); }
    Eigen::Index num_users() const { return mean_lower.cols(); }
    void validate() const;
};

/// Delta-scaled set around given moments: mean in
/// [(1-delta) mean, (1+delta) mean] (lower clamped at 0, requirements are
/// non-negative) and variance capped at (1+delta) variance.
MomentAmbiguity from_moments(const Matrix& mean, const Matrix& variance, double delta);

/// Signed constraint slacks at p; >= 0 means satisfied.  eps-feasibility
/// in the sense of the solvers is min(all slacks) >= -eps, one scalar eps
/// across every constraint.
struct MembershipSlacks {
    Matrix mean_lower;  // sum p r - mean_lower
    Matrix mean_upper;  // mean_upper - sum p r
    Matrix variance;    // variance_upper - var(p)

    double min_slack() const;
    bool eps_feasible(double eps) const { return min_slack() >= -eps; }
};

MembershipSlacks membership_slacks(const DiscreteDistribution& p, const ScenarioSet& scenarios,
                                   const MomentAmbiguity& set);

/// True iff every point mass on a scenario is feasible (hence the whole
/// simplex meets the mean constraints) and the variance caps dominate the
/// largest attainable two-point variance per entry.  A vacuous set leaves
/// the adversary free to choose any distribution on the support.
bool is_vacuous(const MomentAmbiguity& set, const ScenarioSet& scenarios);

/// Builds a vacuous set for the given support: mean bounds [min r, max r]
/// and variance caps at the maximal two-point variance, slightly inflated.
MomentAmbiguity vacuous_for(const ScenarioSet& scenarios);

}  // namespace fairalloc
