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

#include "fairalloc/inner.hpp"

#include "fairalloc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace fairalloc {

IntMatrix chance_indicators(const Vector& x, const ScenarioSet& scenarios,
                            const ResourceInstance& instance) {
    detail::check_scenario_dims(scenarios.num_resources(), scenarios.num_users(), instance);
    if (x.size() != instance.num_users())
        throw Error("chance_indicators: allocation length does not match instance");
    const Eigen::Index m = instance.num_resources();
    const Eigen::Index n = scenarios.size();
    IntMatrix z(m, n);
    for (Eigen::Index w = 0; w < n; ++w) {
        const auto ok = capacity_satisfied(x, scenarios.scenarios[static_cast<std::size_t>(w)],
                                           instance.capacities);
        for (Eigen::Index i = 0; i < m; ++i) z(i, w) = ok[i] ? 1 : 0;
    }
    return z;
}

namespace {

// One variance row: var_k(p) = q.p - (r.p)^2 <= cap, with q = r^2.
struct VarianceRow {
    Vector r;
    Vector q;
    double cap;
};

struct InnerSetup {
    PolyhedralProjector projector;       // simplex + active mean slabs + chance rows
    std::vector<VarianceRow> variances;  // entries whose cap can actually bind
    // full constraint data for final feasibility reporting
    const ScenarioSet* scenarios = nullptr;
    const MomentAmbiguity* set = nullptr;
    IntMatrix z;
    double theta = 0.0;
};

// Collects the rows that can actually bind.  A mean slab is dropped when
// the whole value range [min_w r, max_w r] sits inside it; a chance row is
// dropped when z is all ones or theta = 0; a variance row is dropped when
// the cap dominates the largest two-point variance on the support.
InnerSetup build_setup(const ScenarioSet& scenarios, const MomentAmbiguity& set, const IntMatrix& z,
                       double theta) {
    const Eigen::Index n = scenarios.size();
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index d = scenarios.num_users();

    InnerSetup s;
    s.scenarios = &scenarios;
    s.set = &set;
    s.z = z;
    s.theta = theta;
    s.projector.set_simplex(true);

    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            Vector r(n), q(n);
            double lo = scenarios.scenarios.front()(i, j), hi = lo;
            for (Eigen::Index w = 0; w < n; ++w) {
                const double v = scenarios.scenarios[static_cast<std::size_t>(w)](i, j);
                r[w] = v;
                q[w] = v * v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (lo < set.mean_lower(i, j) - 1e-15 || hi > set.mean_upper(i, j) + 1e-15)
                s.projector.add_slab(r, set.mean_lower(i, j), set.mean_upper(i, j));
            const double max_var = (hi - lo) * (hi - lo) / 4.0;
            if (set.variance_upper(i, j) < max_var)
                s.variances.push_back({std::move(r), std::move(q), set.variance_upper(i, j)});
        }
    }
    if (theta > 0.0) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (z.row(i).minCoeff() == 1) continue;  // every scenario satisfied
            Vector a(n);
            for (Eigen::Index w = 0; w < n; ++w) a[w] = -static_cast<double>(z(i, w));
            s.projector.add_halfspace(a, -theta);  // sum p z >= theta
        }
    }
    return s;
}

double variance_violation(const InnerSetup& s, const Vector& p) {
    double worst = 0.0;
    for (const VarianceRow& row : s.variances) {
        const double mean = row.r.dot(p);
        worst = std::max(worst, row.q.dot(p) - mean * mean - row.cap);
    }
    return worst;
}

double chance_violation(const InnerSetup& s, const Vector& p) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < s.z.rows(); ++i) {
        double mass = 0.0;
        for (Eigen::Index w = 0; w < p.size(); ++w) mass += p[w] * s.z(i, w);
        worst = std::max(worst, s.theta - mass);
    }
    return worst;
}

struct Candidate {
    Vector p;
    double value = std::numeric_limits<double>::infinity();
    double moment_violation = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

// Projected-gradient descent on v.p + weight * sum hinge(var - cap) over
// the linear polytope, with the exact-penalty schedule: weight x10 per
// round, step halving on non-descent, stop when the step underflows or the
// variance rows are satisfied within eps/4.
Vector penalized_descent(const InnerSetup& s, const Vector& v, const Vector& p0, double eps,
                         int rounds, int iters_per_round) {
    // feasibility within the loop is approximate (capped Dykstra cycles);
    // callers finish with a full-accuracy projection and pull_to_feasible
    const int quick_cycles = 120;
    Vector p = s.projector.project(p0);
    const double vscale = std::max(1.0, v.size() > 0 ? v.cwiseAbs().maxCoeff() : 1.0);
    double weight = vscale;
    for (int round = 0; round < rounds; ++round) {
        auto fval = [&](const Vector& q) {
            double f = v.dot(q);
            for (const VarianceRow& row : s.variances) {
                const double mean = row.r.dot(q);
                f += weight * std::max(0.0, row.q.dot(q) - mean * mean - row.cap);
            }
            return f;
        };
        double step = 1.0 / (1.0 + v.norm());
        double cur = fval(p);
        for (int it = 0; it < iters_per_round && step >= 1e-10; ++it) {
            Vector g = v;
            for (const VarianceRow& row : s.variances) {
                const double mean = row.r.dot(p);
                if (row.q.dot(p) - mean * mean - row.cap > 0.0)
                    g += weight * (row.q - 2.0 * mean * row.r);
            }
            const Vector trial = s.projector.project(p - step * g, 1e-12, quick_cycles);
            const double tv = fval(trial);
            if (tv < cur - 1e-15) {
                p = trial;
                cur = tv;
                step *= 1.3;
            } else {
                step *= 0.5;
            }
        }
        if (variance_violation(s, p) <= eps / 4.0) break;
        weight *= 10.0;
        p = s.projector.project(p);  // full-accuracy refeasibilization per round
    }
    return p;
}

double total_violation(const InnerSetup& s, const Vector& p) {
    return std::max(s.projector.max_violation(p), variance_violation(s, p));
}

// Bisection toward a feasible anchor.  The linear violations are convex in
// p, so their sublevel sets are convex along the segment; the variance
// rows are handled by keeping the feasible end invariant.  Dykstra can
// stall near tangent constraint corners, and this repairs its residual.
Vector pull_to_feasible(const InnerSetup& s, const Vector& p, const Vector& anchor, double tol) {
    if (total_violation(s, p) <= tol) return p;
    if (total_violation(s, anchor) > tol) return p;  // anchor cannot help
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vector q = (1.0 - mid) * p + mid * anchor;
        if (total_violation(s, q) <= tol) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return (1.0 - hi) * p + hi * anchor;
}

Candidate assess(const InnerSetup& s, const Vector& v, const Vector& p, double eps) {
    Candidate c;
    c.p = p;
    // clean tiny negatives from projections
    c.p = c.p.cwiseMax(0.0);
    const double sum = c.p.sum();
    if (sum > 0.0) c.p /= sum;
    DiscreteDistribution dist{c.p};
    const MembershipSlacks slacks = membership_slacks(dist, *s.scenarios, *s.set);
    c.moment_violation = std::max(0.0, -slacks.min_slack());
    const double chance = chance_violation(s, c.p);
    c.feasible = c.moment_violation <= eps / 2.0 && chance <= 1e-9;
    c.value = v.dot(c.p);
    return c;
}

Vector per_scenario_values(const Vector& x, const ScenarioSet& scenarios,
                           const ResourceInstance& instance, double beta, double lambda) {
    const Matrix mus = mu_table(instance, scenarios);
    Vector v(scenarios.size());
    for (Eigen::Index w = 0; w < v.size(); ++w) {
        const double f = eval_fairness(x, mus.row(w).transpose(), beta, lambda).value;
        if (!std::isfinite(f)) {
            std::ostringstream os;
            os << "solve_inner: F(x, scenario " << w << ") is not finite"
               << " (beta > 1 requires strictly positive x)";
            throw Error(os.str());
        }
        v[w] = f;
    }
    return v;
}

std::vector<Vector> restart_points(const Vector& v, Eigen::Index n, int restarts,
                                   std::uint64_t seed) {
    std::vector<Vector> inits;
    inits.push_back(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    // vertices at the most adversarial scenarios first
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    const int vertices = static_cast<int>(std::min<Eigen::Index>(n, 10));
    for (int k = 0; k < vertices && static_cast<int>(inits.size()) < restarts; ++k) {
        Vector e = Vector::Zero(n);
        e[order[static_cast<std::size_t>(k)]] = 1.0;
        inits.push_back(std::move(e));
    }
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    while (static_cast<int>(inits.size()) < restarts) {
        Vector p(n);
        for (Eigen::Index w = 0; w < n; ++w) p[w] = expo(rng);
        p /= p.sum();
        inits.push_back(std::move(p));
    }
    return inits;
}

}  // namespace

InnerResult solve_inner(const Vector& x, const ScenarioSet& scenarios,
                        const ResourceInstance& instance, const MomentAmbiguity& set, double theta,
                        double beta, double lambda, double eps, std::uint64_t seed) {
    scenarios.validate();
    set.validate();
    if (!(eps > 0.0)) throw Error("solve_inner: eps must be > 0");
    const Eigen::Index n = scenarios.size();
    const Vector v = per_scenario_values(x, scenarios, instance, beta, lambda);
    const IntMatrix z = chance_indicators(x, scenarios, instance);

    if (theta > 0.0) {
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            if (z.row(i).maxCoeff() == 0) {
                std::ostringstream os;
                os << "solve_inner: no scenario satisfies resource " << i
                   << " at this allocation; chance constraint infeasible for theta > 0";
                throw InfeasibleError(os.str());
            }
        }
    }

    InnerSetup setup = build_setup(scenarios, set, z, theta);

    if (n == 1) {
        Candidate c = assess(setup, v, Vector::Ones(1), eps);
        if (!c.feasible)
            throw InfeasibleError("solve_inner: the single-scenario point mass violates the set");
        return {DiscreteDistribution{c.p}, c.value, c.moment_violation, 1, false};
    }

    // uniform-restoration phase: a feasible point must exist and doubles
    // as the variance pull-back anchor
    Vector anchor = setup.projector.project(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    if (setup.projector.max_violation(anchor) > std::max(1e-9, eps / 4.0)) {
        throw InfeasibleError(
            "solve_inner: moment and chance constraints admit no distribution (restoration "
            "failed)");
    }
    if (variance_violation(setup, anchor) > eps / 4.0) {
        // try to push the variance rows feasible with a zero objective
        anchor = penalized_descent(setup, Vector::Zero(n), anchor, eps, 6, 250);
        if (variance_violation(setup, anchor) > eps / 2.0)
            throw InfeasibleError(
                "solve_inner: variance caps admit no distribution inside the mean/chance "
                "polytope");
    }

    const int restarts = 20;
    const std::vector<Vector> inits = restart_points(v, n, restarts, seed);
    Candidate best;
    for (const Vector& p0 : inits) {
        Vector p = penalized_descent(setup, v, p0, eps, 6, 250);
        p = setup.projector.project(p, 1e-12, 5000);
        p = pull_to_feasible(setup, p, anchor, eps / 4.0);
        const Candidate c = assess(setup, v, p, eps);
        if (c.feasible && (!best.feasible || c.value < best.value - 1e-12)) best = c;
    }
    if (!best.feasible)
        throw InfeasibleError("solve_inner: no restart reached an eps/2-feasible distribution");
    return {DiscreteDistribution{best.p}, best.value, best.moment_violation,
            static_cast<int>(inits.size()), false};
}

InnerResult inner_oracle(const Vector& x, const ScenarioSet& scenarios,
                         const ResourceInstance& instance, const MomentAmbiguity& set, double theta,
                         double beta, double lambda, int grid_k) {
    scenarios.validate();
    const Eigen::Index n = scenarios.size();
    if (n > 8) throw Error("inner_oracle: |Omega| capped at 8, got " + std::to_string(n));
    if (grid_k < 1 || grid_k > 60) throw Error("inner_oracle: grid_k must lie in [1, 60]");

    const Vector v = per_scenario_values(x, scenarios, instance, beta, lambda);
    const IntMatrix z = chance_indicators(x, scenarios, instance);
    InnerSetup setup = build_setup(scenarios, set, z, theta);

    const double lattice_tol = 1e-9;
    Vector p(n);
    Vector best_feasible;
    double best_value = std::numeric_limits<double>::infinity();
    Vector least_violating;
    double least_violation = std::numeric_limits<double>::infinity();

    // depth-first over compositions of grid_k into n parts
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    auto visit = [&](auto&& self, Eigen::Index idx, int remaining) -> void {
        if (idx == n - 1) {
            counts[static_cast<std::size_t>(idx)] = remaining;
            for (Eigen::Index w = 0; w < n; ++w)
                p[w] = static_cast<double>(counts[static_cast<std::size_t>(w)]) / grid_k;
            DiscreteDistribution dist{p};
            const MembershipSlacks slacks = membership_slacks(dist, scenarios, set);
            const double viol =
                std::max(std::max(0.0, -slacks.min_slack()), chance_violation(setup, p));
            if (viol <= lattice_tol) {
                const double val = v.dot(p);
                if (val < best_value) {
                    best_value = val;
                    best_feasible = p;
                }
            }
            if (viol < least_violation) {
                least_violation = viol;
                least_violating = p;
            }
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(idx)] = c;
            self(self, idx + 1, remaining - c);
        }
    };
    visit(visit, 0, grid_k);

    // polish the best lattice candidates with the local machinery
    const double eps = 1e-8;
    std::vector<Vector> starts;
    if (best_feasible.size() > 0) starts.push_back(best_feasible);
    if (least_violating.size() > 0) starts.push_back(least_violating);
    starts.push_back(Vector::Constant(n, 1.0 / static_cast<double>(n)));

    Vector anchor =
        best_feasible.size() > 0
            ? best_feasible
            : setup.projector.project(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    if (variance_violation(setup, anchor) > eps / 4.0)
        anchor = penalized_descent(setup, Vector::Zero(n), anchor, eps, 6, 250);

    Candidate best;
    for (const Vector& p0 : starts) {
        Vector q = penalized_descent(setup, v, p0, eps, 6, 400);
        q = setup.projector.project(q, 1e-12, 5000);
        q = pull_to_feasible(setup, q, anchor, eps / 4.0);
        const Candidate c = assess(setup, v, q, eps);
        if (c.feasible && (!best.feasible || c.value < best.value)) best = c;
    }
    if (!best.feasible) {
        if (best_feasible.size() == 0)
            throw InfeasibleError("inner_oracle: no feasible lattice point and polish failed");
        best = assess(setup, v, best_feasible, eps);
    }
    // never report worse than the best strictly feasible lattice point
    if (best_feasible.size() > 0 && best_value < best.value) {
        best = assess(setup, v, best_feasible, eps);
    }
    return {DiscreteDistribution{best.p}, best.value, best.moment_violation, 1, true};
}

Vector worst_chance_masses(const Vector& x, const ScenarioSet& scenarios,
                           const ResourceInstance& instance, const MomentAmbiguity& set,
                           double eps, std::uint64_t seed,
                           std::vector<DiscreteDistribution>* argmins) {
    scenarios.validate();
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index n = scenarios.size();
    const IntMatrix z = chance_indicators(x, scenarios, instance);
    InnerSetup setup = build_setup(scenarios, set, z, 0.0);

    Vector anchor = setup.projector.project(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    if (variance_violation(setup, anchor) > eps / 4.0)
        anchor = penalized_descent(setup, Vector::Zero(n), anchor, eps, 6, 250);

    if (argmins != nullptr) argmins->assign(static_cast<std::size_t>(m), DiscreteDistribution{});
    Vector masses = Vector::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (z.row(i).minCoeff() == 1) continue;  // satisfied everywhere
        Vector v(n);
        for (Eigen::Index w = 0; w < n; ++w) v[w] = static_cast<double>(z(i, w));
        Candidate best;
        const std::vector<Vector> inits = restart_points(v, n, 8, seed + static_cast<std::uint64_t>(i));
        for (const Vector& p0 : inits) {
            Vector p = penalized_descent(setup, v, p0, eps, 6, 250);
            p = setup.projector.project(p, 1e-12, 5000);
            p = pull_to_feasible(setup, p, anchor, eps / 4.0);
            const Candidate c = assess(setup, v, p, eps);
            if (c.feasible && (!best.feasible || c.value < best.value - 1e-12)) best = c;
        }
        if (!best.feasible) continue;  // empty moment set handled by callers
        masses[i] = best.value;
        if (argmins != nullptr) (*argmins)[static_cast<std::size_t>(i)] = DiscreteDistribution{best.p};
    }
    return masses;
}

DiscreteDistribution moment_feasible_distribution(const ScenarioSet& scenarios,
                                                  const MomentAmbiguity& set, double eps,
                                                  std::uint64_t seed) {
    scenarios.validate();
    const Eigen::Index n = scenarios.size();
    const IntMatrix z = IntMatrix::Ones(scenarios.num_resources(), n);
    InnerSetup setup = build_setup(scenarios, set, z, 0.0);

    Vector p = setup.projector.project(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    if (setup.projector.max_violation(p) > std::max(1e-9, eps / 4.0))
        throw InfeasibleError("moment set admits no distribution over this support");
    if (variance_violation(setup, p) > eps / 4.0) {
        std::mt19937_64 rng(seed);
        std::exponential_distribution<double> expo(1.0);
        Vector best = penalized_descent(setup, Vector::Zero(n), p, eps, 6, 250);
        for (int k = 0; k < 5 && variance_violation(setup, best) > eps / 4.0; ++k) {
            Vector q(n);
            for (Eigen::Index w = 0; w < n; ++w) q[w] = expo(rng);
            q /= q.sum();
            const Vector trial = penalized_descent(setup, Vector::Zero(n), q, eps, 6, 250);
            if (variance_violation(setup, trial) < variance_violation(setup, best)) best = trial;
        }
        p = best;
        if (variance_violation(setup, p) > eps / 2.0)
            throw InfeasibleError("moment set admits no distribution (variance caps too tight)");
    }
    p = setup.projector.project(p, 1e-12, 5000).cwiseMax(0.0);
    p /= p.sum();
    return DiscreteDistribution{p};
}

}  // namespace fairalloc
