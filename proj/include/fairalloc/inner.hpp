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

#include "fairalloc/ambiguity.hpp"
#include "fairalloc/fairness.hpp"

namespace fairalloc {

/// z_i^w = 1 iff allocation x fits scenario w on resource i (with the
/// relative capacity slack).  Given a fixed x the chance constraint
/// Prob >= theta becomes the linear constraint sum_w p^w z_i^w >= theta
/// per resource.
IntMatrix chance_indicators(const Vector& x, const ScenarioSet& scenarios,
                            const ResourceInstance& instance);

struct InnerResult {
    DiscreteDistribution p;
    double value = 0.0;
    double feasibility_eps = 0.0;  // worst moment-constraint violation at p
    int restarts_used = 0;
    bool oracle_certified = false;
};

/// Worst-case distribution at a fixed allocation xhat:
///
///   min_p  sum_w p^w F(xhat, xi^w)
///   s.t.   mean_lower <= sum_w p^w r^w <= mean_upper        (per entry)
///          sum_w p^w (r^w)^2 - (sum_w p^w r^w)^2 <= var cap (per entry)
///          sum_w p^w z_i^w >= theta                         (per resource)
///          p in the simplex.
///
/// The variance rows make the feasible region reverse-convex, so the
/// search is multi-start projected gradient: the linear rows are handled
/// by Dykstra projection, the variance rows by an exact penalty whose
/// weight grows tenfold per round.  The returned p is eps/2-feasible; on
/// desk-scale instances inner_oracle certifies eps/2-optimality.  Throws
/// InfeasibleError when no distribution meets moments and chance rows,
/// which signals that xhat is infeasible at this theta.
InnerResult solve_inner(const Vector& x, const ScenarioSet& scenarios,
                        const ResourceInstance& instance, const MomentAmbiguity& set, double theta,
                        double beta, double lambda, double eps, std::uint64_t seed);

/// Exhaustive reference solver for |Omega| <= 8: scans the simplex lattice
/// {p = n / grid_k}, then polishes the best lattice candidates with the
/// projected-gradient machinery.  grid_k <= 60.
InnerResult inner_oracle(const Vector& x, const ScenarioSet& scenarios,
                         const ResourceInstance& instance, const MomentAmbiguity& set, double theta,
                         double beta, double lambda, int grid_k);

/// A distribution satisfying the moment constraints alone (no chance
/// rows), used to seed the cutting-surface collection.  Starts from the
/// uniform distribution and restores feasibility if needed; throws
/// InfeasibleError when the moment set itself is empty at tolerance eps.
DiscreteDistribution moment_feasible_distribution(const ScenarioSet& scenarios,
                                                  const MomentAmbiguity& set, double eps,
                                                  std::uint64_t seed);

/// Worst-case per-resource satisfaction mass at x over the moment set:
/// masses[i] = min_{p in set} sum_w p^w z_i^w(x).  The chance constraint
/// holds robustly over the whole ambiguity set iff every entry is >=
/// theta; argmins (when requested) receives a minimizing distribution per
/// resource.  Resources whose scenarios x satisfies outright report mass 1
/// without a solve.
Vector worst_chance_masses(const Vector& x, const ScenarioSet& scenarios,
                           const ResourceInstance& instance, const MomentAmbiguity& set,
                           double eps, std::uint64_t seed,
                           std::vector<DiscreteDistribution>* argmins = nullptr);

}  // namespace fairalloc
