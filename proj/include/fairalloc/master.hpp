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

#include "fairalloc/inner.hpp"

#include <functional>

namespace fairalloc {

/// Tightest valid big-M constants given the allocation box:
/// M_i^w = sum_j r_ij^w xbar_j.  Entries below c_i mean the scenario can
/// never be violated inside the box and its indicator is free.
Matrix compute_bigM(const ResourceInstance& instance, const ScenarioSet& scenarios);

/// The natural pattern at x (which scenarios x satisfies per resource) and
/// whether it carries probability mass >= theta on every resource.
std::pair<IntMatrix, bool> select_pattern(const Vector& x, const DiscreteDistribution& p,
                                          const ScenarioSet& scenarios,
                                          const ResourceInstance& instance, double theta);

/// Candidate satisfaction patterns for one distribution: the greedy
/// pattern (drop scenarios per resource in decreasing load-cost order
/// while the mass constraint allows), and, while the enumeration stays
/// under 2^12 patterns, all inclusion-minimal kept sets combined across
/// resources, plus the all-ones pattern.  Beyond the cap only the greedy
/// pattern is returned.
std::vector<IntMatrix> pattern_search(const ScenarioSet& scenarios,
                                      const ResourceInstance& instance,
                                      const DiscreteDistribution& p, double theta);

struct MasterResult {
    Allocation x;
    double level = 0.0;  // min over supplied distributions of expected fairness at x
    int active_distribution = 0;
    std::vector<IntMatrix> patterns;  // one per distribution
    int restarts_used = 0;
    double certificate = 0.0;  // projected-supergradient norm at x
};

/// Restricted master over a finite distribution collection:
///
///   max_x  min_l sum_w p_l^w F(x, xi^w)
///   s.t.   for each l a pattern z^l with sum_w p_l^w z^l_iw >= theta and
///          sum_j r_ij^w x_j <= c_i on every (i, w) with z^l_iw = 1,
///          0 <= x <= xbar.
///
/// Once patterns are fixed the feasible set is a polytope and the
/// min-aggregate is concave in the coupled beta > 1 regime, so the solve
/// alternates pattern selection with projected supergradient ascent
/// (diminishing steps, then a softmin-annealed polish), multi-started over
/// pattern seeds.  Ties across equal-level starts break to the
/// lexicographically smallest x.
MasterResult solve_master(const ScenarioSet& scenarios, const ResourceInstance& instance,
                          const std::vector<DiscreteDistribution>& dists, double theta, double beta,
                          double lambda, double eps, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fixed-constraint concave maximization, shared with the baseline models.

/// One component of a min-aggregate objective; fills *grad when requested.
using ComponentFn = std::function<double(const Vector& x, Vector* grad)>;

struct AscentOptions {
    int max_iters = 5000;      // diminishing-step phase cap
    double step_offset = 10.0; // step rule a / (k + step_offset)
    int polish_iters = 400;    // per annealing round
    int anneal_rounds = 6;
    double eps = 1e-8;
    bool positive_floor = false;  // keep x_j >= 1e-9 xbar_j (beta > 1 objectives)
    std::uint64_t seed = 0;
};

struct AscentOutcome {
    Vector x;
    double value = -std::numeric_limits<double>::infinity();
    double certificate = 0.0;
};

/// Maximizes min_l comps[l](x) over {A x <= b, 0 <= x <= upper}.  Rows of
/// A must be non-negative (capacity-type constraints).
AscentOutcome maximize_min_aggregate(const std::vector<ComponentFn>& comps, const Matrix& A,
                                     const Vector& b, const Vector& upper,
                                     const AscentOptions& opts);

/// Expected-fairness component for a fixed distribution over the rows of a
/// mu table; the workhorse objective for master, SAA and robust solves.
ComponentFn make_expected_fairness_component(const Matrix& mu_rows, const Vector& p, double beta,
                                             double lambda);

/// Capacity rows sum_j r_ij^w x_j <= c_i for every (i, w) pair with
/// keep(i, w) = 1, with rows implied by tighter kept rows pruned.
void build_capacity_rows(const ScenarioSet& scenarios, const ResourceInstance& instance,
                         const std::function<bool(Eigen::Index, Eigen::Index)>& keep, Matrix* A,
                         Vector* b);

}  // namespace fairalloc
