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

// Test-only oracles, kept independent of the implementation paths they
// check: the fairness formula evaluated directly (no log space), small
// derivative-free maximizers, and shared fixture builders.

#pragma once

#include "fairalloc/inner.hpp"
#include "fairalloc/types.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>

namespace fairalloc::testing {

// F = sign(1-beta) (sum_j (y_j/S)^(1-beta))^(1/beta) S^lambda evaluated
// naively with std::pow.
inline double direct_fairness(const Vector& x, const Vector& mu, double beta, double lambda) {
    const Vector y = mu.array() * x.array();
    const double S = y.sum();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) acc += std::pow(y[j] / S, 1.0 - beta);
    const double sign = beta < 1.0 ? 1.0 : -1.0;
    return sign * std::pow(acc, 1.0 / beta) * std::pow(S, lambda);
}

// direct coupled form sign(1-beta) (sum_j y_j^(1-beta))^(1/beta)
inline double direct_coupled(const Vector& x, const Vector& mu, double beta) {
    const Vector y = mu.array() * x.array();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) acc += std::pow(y[j], 1.0 - beta);
    const double sign = beta < 1.0 ? 1.0 : -1.0;
    return sign * std::pow(acc, 1.0 / beta);
}

// golden-section maximizer on [lo, hi]
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int k = 0; k < iters; ++k) {
        // ties contract from the right so infeasible plateaus shrink away
        if (f(c) >= f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    return 0.5 * (a + b);
}

// exhaustive maximizer over an n x n grid on [0, ux] x [0, uy]
struct Grid2DResult {
    double x1 = 0.0;
    double x2 = 0.0;
    double value = -std::numeric_limits<double>::infinity();
};

inline Grid2DResult grid2d_max(const std::function<double(double, double)>& f, double ux,
                               double uy, int n) {
    Grid2DResult best;
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            const double x1 = ux * a / n;
            const double x2 = uy * b / n;
            const double v = f(x1, x2);
            if (std::isfinite(v) && v > best.value) best = {x1, x2, v};
        }
    }
    return best;
}

// the two-user datacenter demo instance: CPU/RAM capacities (9, 18),
// explicit allocation box (9, 18)
inline ResourceInstance toy_instance() {
    ResourceInstance inst;
    inst.users = 2;
    inst.capacities = Vector(2);
    inst.capacities << 9.0, 18.0;
    inst.allocation_upper = Vector(2);
    inst.allocation_upper << 9.0, 18.0;
    inst.resource_labels = {"CPU", "RAM"};
    inst.user_labels = {"user1", "user2"};
    return inst;
}

// deterministic uniform double in [lo, hi]
inline double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Joint brute force for the worst-case model: an x grid crossed with the
// simplex-lattice inner oracle.  A grid point is admissible only when the
// chance constraint holds under every moment-feasible distribution, which
// is cached per distinct satisfaction pattern.  Inside the admissible
// region the chance rows are inactive, so the precomputed moment-feasible
// lattice bounds the inner minimum and prunes grid points that cannot
// beat the incumbent before the expensive oracle polish runs.
struct BruteForceResult {
    double value = -std::numeric_limits<double>::infinity();
    Vector x;
};

inline BruteForceResult sadr_brute_force(const ResourceInstance& instance,
                                         const ScenarioSet& scenarios, const MomentAmbiguity& set,
                                         double theta, double beta, double lambda, int grid_n,
                                         int grid_k) {
    const Eigen::Index n = scenarios.size();
    const Eigen::Index d = instance.num_users();
    const Matrix mus = mu_table(instance, scenarios);

    // moment-feasible lattice points (x independent)
    std::vector<Vector> lattice;
    {
        std::vector<int> counts(static_cast<std::size_t>(n), 0);
        Vector p(n);
        std::function<void(Eigen::Index, int)> visit = [&](Eigen::Index idx, int remaining) {
            if (idx == n - 1) {
                counts[static_cast<std::size_t>(idx)] = remaining;
                for (Eigen::Index w = 0; w < n; ++w)
                    p[w] = static_cast<double>(counts[static_cast<std::size_t>(w)]) / grid_k;
                DiscreteDistribution dist{p};
                if (membership_slacks(dist, scenarios, set).eps_feasible(1e-9)) lattice.push_back(p);
                return;
            }
            for (int c = 0; c <= remaining; ++c) {
                counts[static_cast<std::size_t>(idx)] = c;
                visit(idx + 1, remaining - c);
            }
        };
        visit(0, grid_k);
    }

    std::map<std::vector<int>, double> chance_cache;  // z bitmask -> min mass
    auto admissible = [&](const Vector& x) {
        if (theta <= 0.0) return true;
        const IntMatrix z = chance_indicators(x, scenarios, instance);
        std::vector<int> key(z.data(), z.data() + z.size());
        auto it = chance_cache.find(key);
        if (it == chance_cache.end()) {
            const Vector masses = worst_chance_masses(x, scenarios, instance, set, 1e-7, 17);
            it = chance_cache.emplace(std::move(key), masses.minCoeff()).first;
        }
        return it->second >= theta - 1e-6;
    };

    BruteForceResult best;
    Vector v(n);
    for (int cell = 0; cell < (grid_n + 1); ++cell) {
        // iterate the full d-dimensional grid via mixed radix
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        idx[0] = cell;
        bool done = false;
        while (!done) {
            Vector x(d);
            bool positive = false;
            for (Eigen::Index j = 0; j < d; ++j) {
                x[j] = instance.allocation_upper[j] * idx[static_cast<std::size_t>(j)] / grid_n;
                positive |= x[j] > 0.0;
            }
            if (positive && admissible(x)) {
                for (Eigen::Index w = 0; w < n; ++w)
                    v[w] = eval_fairness(x, mus.row(w).transpose(), beta, lambda).value;
                double lattice_min = std::numeric_limits<double>::infinity();
                for (const Vector& p : lattice) lattice_min = std::min(lattice_min, v.dot(p));
                if (lattice_min > best.value) {
                    // only now pay for the oracle polish; chance rows are
                    // inactive inside the admissible region
                    const InnerResult q =
                        inner_oracle(x, scenarios, instance, set, 0.0, beta, lambda, grid_k);
                    if (q.value > best.value) {
                        best.value = q.value;
                        best.x = x;
                    }
                }
            }
            // advance indices 1..d-1 (index 0 pinned to the outer loop)
            Eigen::Index j = 1;
            for (; j < d; ++j) {
                if (++idx[static_cast<std::size_t>(j)] <= grid_n) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
            done = (d == 1) || (j == d);
        }
    }
    return best;
}

}  // namespace fairalloc::testing
