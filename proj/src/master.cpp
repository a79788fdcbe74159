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

#include "fairalloc/master.hpp"

#include "fairalloc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace fairalloc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kPatternEnumerationCap = 1 << 12;
}  // namespace

Matrix compute_bigM(const ResourceInstance& instance, const ScenarioSet& scenarios) {
    detail::check_scenario_dims(scenarios.num_resources(), scenarios.num_users(), instance);
    if (!instance.has_allocation_upper())
        throw Error("compute_bigM: allocation_upper must be set (see default_allocation_upper)");
    const Eigen::Index m = instance.num_resources();
    const Eigen::Index n = scenarios.size();
    Matrix M(m, n);
    for (Eigen::Index w = 0; w < n; ++w)
        M.col(w) = scenarios.scenarios[static_cast<std::size_t>(w)] * instance.allocation_upper;
    return M;
}

std::pair<IntMatrix, bool> select_pattern(const Vector& x, const DiscreteDistribution& p,
                                          const ScenarioSet& scenarios,
                                          const ResourceInstance& instance, double theta) {
    p.validate();
    if (p.p.size() != scenarios.size())
        throw Error("select_pattern: distribution length does not match scenario count");
    IntMatrix z = chance_indicators(x, scenarios, instance);
    bool feasible = true;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        double mass = 0.0;
        for (Eigen::Index w = 0; w < z.cols(); ++w) mass += p.p[w] * z(i, w);
        if (mass < theta - 1e-9) feasible = false;
    }
    return {std::move(z), feasible};
}

namespace {

// Per-resource kept sets: all inclusion-minimal subsets with mass >= theta.
// Scenarios with zero probability never need to be kept.
std::vector<std::vector<int>> minimal_kept_sets(const Vector& p, double theta, int cap,
                                                bool* capped) {
    const Eigen::Index n = p.size();
    std::vector<std::vector<int>> out;
    std::vector<int> kept(static_cast<std::size_t>(n), 1);
    const double tol = 1e-12;

    // DFS over drop decisions in index order; prune when even keeping all
    // remaining scenarios cannot reach theta.
    std::vector<double> suffix_mass(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index w = n - 1; w >= 0; --w)
        suffix_mass[static_cast<std::size_t>(w)] = suffix_mass[static_cast<std::size_t>(w) + 1] + p[w];

    std::function<void(Eigen::Index, double)> dfs = [&](Eigen::Index idx, double kept_mass) {
        if (*capped) return;
        if (kept_mass + suffix_mass[static_cast<std::size_t>(idx)] < theta - tol) return;
        if (idx == n) {
            if (kept_mass >= theta - tol) {
                // minimal iff dropping any kept positive-mass scenario breaks theta
                for (Eigen::Index w = 0; w < n; ++w) {
                    if (kept[static_cast<std::size_t>(w)] == 1 && p[w] > tol &&
                        kept_mass - p[w] >= theta - tol)
                        return;
                    if (kept[static_cast<std::size_t>(w)] == 1 && p[w] <= tol) return;  // droppable
                }
                out.push_back(kept);
                if (static_cast<int>(out.size()) > cap) *capped = true;
            }
            return;
        }
        kept[static_cast<std::size_t>(idx)] = 1;
        dfs(idx + 1, kept_mass + p[idx]);
        kept[static_cast<std::size_t>(idx)] = 0;
        dfs(idx + 1, kept_mass);
        kept[static_cast<std::size_t>(idx)] = 1;
    };
    dfs(0, 0.0);
    return out;
}

// Greedy pattern: start from all-ones and drop the most load-costly
// scenarios per resource while the mass constraint stays satisfied.
IntMatrix greedy_pattern(const ScenarioSet& scenarios, const ResourceInstance& instance,
                         const Vector& p, double theta) {
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index n = scenarios.size();
    Vector upper = instance.has_allocation_upper()
                       ? instance.allocation_upper
                       : default_allocation_upper(instance, scenarios);
    IntMatrix z = IntMatrix::Ones(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::vector<double> cost(static_cast<std::size_t>(n));
        for (Eigen::Index w = 0; w < n; ++w)
            cost[static_cast<std::size_t>(w)] =
                scenarios.scenarios[static_cast<std::size_t>(w)].row(i).dot(upper) /
                instance.capacities[i];
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return cost[static_cast<std::size_t>(a)] > cost[static_cast<std::size_t>(b)];
        });
        double mass = 1.0;
        for (Eigen::Index w : order) {
            if (mass - p[w] >= theta - 1e-12) {
                z(i, w) = 0;
                mass -= p[w];
            }
        }
    }
    return z;
}

struct IntMatrixLess {
    bool operator()(const IntMatrix& a, const IntMatrix& b) const {
        if (a.rows() != b.rows()) return a.rows() < b.rows();
        if (a.cols() != b.cols()) return a.cols() < b.cols();
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                            b.data() + b.size());
    }
};

}  // namespace

std::vector<IntMatrix> pattern_search(const ScenarioSet& scenarios,
                                      const ResourceInstance& instance,
                                      const DiscreteDistribution& p, double theta) {
    scenarios.validate();
    p.validate();
    if (p.p.size() != scenarios.size())
        throw Error("pattern_search: distribution length does not match scenario count");
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index n = scenarios.size();

    const IntMatrix greedy = greedy_pattern(scenarios, instance, p.p, theta);

    // the per-resource candidate kept sets coincide (the mass constraint
    // only sees p), so enumerate them once
    bool capped = false;
    auto sets = minimal_kept_sets(p.p, theta, kPatternEnumerationCap, &capped);
    if (sets.empty()) sets.push_back(std::vector<int>(static_cast<std::size_t>(n), 1));
    double combos = 1.0;
    for (Eigen::Index i = 0; i < m; ++i) combos *= static_cast<double>(sets.size());
    if (capped || combos > kPatternEnumerationCap) return {greedy};
    std::vector<std::vector<std::vector<int>>> per_resource(static_cast<std::size_t>(m), sets);

    std::vector<IntMatrix> out;
    std::set<IntMatrix, IntMatrixLess> seen;
    out.push_back(greedy);
    seen.insert(greedy);

    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
    bool done = false;
    while (!done) {
        IntMatrix z(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index w = 0; w < n; ++w)
                z(i, w) = per_resource[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]]
                                      [static_cast<std::size_t>(w)];
        if (seen.insert(z).second) out.push_back(std::move(z));
        // advance the mixed-radix counter
        Eigen::Index i = 0;
        for (; i < m; ++i) {
            if (++pick[static_cast<std::size_t>(i)] <
                per_resource[static_cast<std::size_t>(i)].size())
                break;
            pick[static_cast<std::size_t>(i)] = 0;
        }
        done = (i == m) || static_cast<int>(out.size()) >= kPatternEnumerationCap;
    }
    const IntMatrix all_ones = IntMatrix::Ones(m, n);
    if (seen.insert(all_ones).second) out.push_back(all_ones);

    // most permissive first: fewest kept rows, all-ones naturally last
    std::stable_sort(out.begin() + 1, out.end(), [](const IntMatrix& a, const IntMatrix& b) {
        return a.sum() < b.sum();
    });
    return out;
}

void build_capacity_rows(const ScenarioSet& scenarios, const ResourceInstance& instance,
                         const std::function<bool(Eigen::Index, Eigen::Index)>& keep, Matrix* A,
                         Vector* b) {
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index n = scenarios.size();
    const Eigen::Index d = scenarios.num_users();

    std::vector<Vector> rows;  // normalized by capacity: a.x <= 1
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index w = 0; w < n; ++w) {
            if (!keep(i, w)) continue;
            Vector a = scenarios.scenarios[static_cast<std::size_t>(w)].row(i).transpose() /
                       instance.capacities[i];
            if (a.maxCoeff() <= 0.0) continue;
            rows.push_back(std::move(a));
        }
    }
    // prune rows implied by a componentwise-tighter kept row
    std::vector<bool> dominated(rows.size(), false);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t s = 0; s < rows.size() && !dominated[r]; ++s) {
            if (r == s || dominated[s]) continue;
            const bool geq = (rows[s].array() >= rows[r].array() - 1e-15).all();
            if (geq && (s < r || (rows[s].array() > rows[r].array() + 1e-15).any()))
                dominated[r] = true;
        }
    }
    Eigen::Index kept_count = 0;
    for (bool f : dominated) kept_count += f ? 0 : 1;
    A->resize(kept_count, d);
    b->resize(kept_count);
    Eigen::Index k = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (dominated[r]) continue;
        A->row(k) = rows[r].transpose();
        (*b)[k] = 1.0;
        ++k;
    }
}

ComponentFn make_expected_fairness_component(const Matrix& mu_rows, const Vector& p, double beta,
                                             double lambda) {
    // scalar path: exact boundary semantics, finite differences at beta=0
    auto scalar_eval = [mu_rows, p, beta, lambda](const Vector& x, Vector* grad) -> double {
        const double val = expected_fairness_mu(x, mu_rows, p, beta, lambda);
        if (grad != nullptr) {
            if (std::abs(beta) <= kBetaZeroWindow) {
                Vector g(x.size());
                const double h0 = 1e-6;
                for (Eigen::Index j = 0; j < x.size(); ++j) {
                    const double h = h0 * std::max(1.0, std::abs(x[j]));
                    Vector xp = x, xm = x;
                    xp[j] += h;
                    xm[j] = std::max(xm[j] - h, 1e-14);
                    g[j] = (expected_fairness_mu(xp, mu_rows, p, beta, lambda) -
                            expected_fairness_mu(xm, mu_rows, p, beta, lambda)) /
                           (xp[j] - xm[j]);
                }
                *grad = g;
            } else {
                Vector xs = x.cwiseMax(1e-13 * std::max(1.0, x.maxCoeff()));
                *grad = expected_fairness_gradient(xs, mu_rows, p, beta, lambda);
            }
        }
        return val;
    };
    if (std::abs(beta) <= kBetaZeroWindow || std::abs(beta - 1.0) <= kBetaOneWindow)
        return scalar_eval;

    // vectorized interior path over the whole scenario block; solvers hit
    // this millions of times
    const double sign = beta < 1.0 ? 1.0 : -1.0;
    const double kappa = lambda + (beta - 1.0) / beta;
    return [mu_rows, p, beta, lambda, sign, kappa, scalar_eval](const Vector& raw,
                                                                Vector* grad) -> double {
        // projector round-off can leave coordinates a hair below zero
        const Vector x = raw.cwiseMax(0.0);
        if ((x.array() <= 0.0).any()) return scalar_eval(x, grad);
        using Array2 = Eigen::ArrayXXd;
        using Array1 = Eigen::ArrayXd;
        const Array2 Y = mu_rows.array().rowwise() * x.transpose().array();
        const Array2 logY = Y.log();
        const Array1 S = Y.rowwise().sum();
        const Array2 Lb = (1.0 - beta) * logY;
        const Array1 M = Lb.rowwise().maxCoeff();
        const Array1 logB = M + (Lb.colwise() - M).exp().rowwise().sum().log();
        const Array1 logS = S.log();
        const Array1 F = sign * (logB / beta + kappa * logS).exp();
        if (!F.isFinite().all()) return scalar_eval(x, grad);
        const double value = (p.array() * F).sum();
        if (grad != nullptr) {
            // dF/dx_j = F mu_j ((1-beta)/beta y_j^-beta / B + kappa / S)
            Array2 W = ((-beta) * logY).colwise() - logB;
            W = (1.0 - beta) / beta * W.exp();
            W.colwise() += kappa / S;
            const Array1 pf = p.array() * F;
            *grad = ((mu_rows.array() * W).colwise() * pf).colwise().sum().transpose();
        }
        return value;
    };
}

namespace {

struct MinAggregate {
    const std::vector<ComponentFn>* comps;

    double value(const Vector& x, int* active = nullptr) const {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t l = 0; l < comps->size(); ++l) {
            const double v = (*comps)[l](x, nullptr);
            if (v < best) {
                best = v;
                arg = static_cast<int>(l);
            }
        }
        if (active != nullptr) *active = arg;
        return best;
    }

    // supergradient = gradient of the active component
    double value_and_supergradient(const Vector& x, Vector* g) const {
        int active = 0;
        const double v = value(x, &active);
        if (g != nullptr) {
            if (std::isfinite(v)) {
                (*comps)[static_cast<std::size_t>(active)](x, g);
            } else {
                g->setZero(x.size());
            }
        }
        return v;
    }

    // softmin smoothing: -tau log sum exp(-G_l / tau), concave and
    // nondecreasing in every component
    double soft_value_and_gradient(const Vector& x, double tau, Vector* g) const {
        const std::size_t L = comps->size();
        std::vector<double> vals(L);
        std::vector<Vector> grads(g != nullptr ? L : 0);
        for (std::size_t l = 0; l < L; ++l)
            vals[l] = (*comps)[l](x, g != nullptr ? &grads[l] : nullptr);
        const double vmin = *std::min_element(vals.begin(), vals.end());
        if (!std::isfinite(vmin)) {
            if (g != nullptr) g->setZero(x.size());
            return vmin;
        }
        double z = 0.0;
        for (double v : vals) z += std::exp(-(v - vmin) / tau);
        const double soft = vmin - tau * std::log(z);
        if (g != nullptr) {
            g->setZero(x.size());
            for (std::size_t l = 0; l < L; ++l) {
                const double w = std::exp(-(vals[l] - vmin) / tau) / z;
                *g += w * grads[l];
            }
        }
        return soft;
    }
};

}  // namespace

AscentOutcome maximize_min_aggregate(const std::vector<ComponentFn>& comps, const Matrix& A,
                                     const Vector& b, const Vector& upper,
                                     const AscentOptions& opts) {
    if (comps.empty()) throw Error("maximize_min_aggregate: no objective components");
    const Eigen::Index d = upper.size();
    const Vector lower = opts.positive_floor ? Vector(1e-9 * upper) : Vector(Vector::Zero(d));

    PolyhedralProjector proj;
    proj.set_box(lower, upper);
    for (Eigen::Index r = 0; r < A.rows(); ++r) proj.add_halfspace(A.row(r).transpose(), b[r]);

    MinAggregate agg{&comps};
    const double scale = upper.norm();

    std::vector<Vector> inits;
    inits.push_back(0.5 * upper);
    inits.push_back(upper / static_cast<double>(d));
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    for (int k = 0; k < 3; ++k) {
        Vector x(d);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = unif(rng) * upper[j];
        inits.push_back(std::move(x));
    }

    AscentOutcome best;
    for (const Vector& raw : inits) {
        Vector x = proj.project(raw).cwiseMax(lower).cwiseMin(upper);
        Vector g(d);
        double fx = agg.value_and_supergradient(x, &g);
        const int quick_cycles = 60;  // full-accuracy projection happens once at the end

        // diminishing-step supergradient phase, step a/(k + offset) with a
        // calibrated from the initial supergradient norm; moves are capped
        // at a few box diameters so stiff gradients cannot fling the
        // iterate out of the projector's reliable range
        const double g0 = std::max(g.norm(), 1e-12);
        const double a = 0.1 * std::max(scale, 1e-9) / g0 * opts.step_offset;
        const double max_move = 2.0 * std::max(scale, 1e-9);
        Vector xbest = x;
        double fbest = fx;
        int stall = 0;
        for (int k = 0; k < opts.max_iters; ++k) {
            const double step = a / (static_cast<double>(k) + opts.step_offset);
            Vector move = step * g;
            const double mn = move.norm();
            if (mn > max_move) move *= max_move / mn;
            x = proj.project(x + move, 1e-12, quick_cycles).cwiseMax(lower).cwiseMin(upper);
            fx = agg.value_and_supergradient(x, &g);
            if (fx > fbest + 1e-12 * (1.0 + std::abs(fbest))) {
                fbest = fx;
                xbest = x;
                stall = 0;
            } else if (++stall > 300) {
                break;
            }
        }

        // softmin-annealed polish with backtracking projected ascent; a
        // single component needs no smoothing (softmin is the identity)
        x = xbest;
        const int rounds = comps.size() == 1 ? 1 : opts.anneal_rounds;
        double tau0 = 1e-2 * (1.0 + std::abs(fbest));
        for (int round = 0; round < rounds; ++round) {
            const double tau = tau0 * std::pow(0.1, round);
            double cur = agg.soft_value_and_gradient(x, tau, &g);
            double t = 1e-2 * scale / std::max(g.norm(), 1e-12);
            for (int it = 0; it < opts.polish_iters && t > 1e-13 * scale; ++it) {
                Vector move = t * g;
                const double mn = move.norm();
                if (mn > max_move) move *= max_move / mn;
                const Vector trial =
                    proj.project(x + move, 1e-12, quick_cycles).cwiseMax(lower).cwiseMin(upper);
                const double tv = agg.soft_value_and_gradient(trial, tau, nullptr);
                if (tv > cur + 1e-14 * (1.0 + std::abs(cur))) {
                    x = trial;
                    cur = tv;
                    agg.soft_value_and_gradient(x, tau, &g);
                    t *= 1.5;
                } else {
                    t *= 0.5;
                }
            }
            const double truev = agg.value(x);
            if (truev > fbest) {
                fbest = truev;
                xbest = x;
            }
        }

        // full-accuracy feasibility cleanup of the winner
        {
            const Vector cleaned = proj.project(xbest, 1e-12, 4000).cwiseMax(lower).cwiseMin(upper);
            const double cv = agg.value(cleaned);
            if (std::isfinite(cv)) {
                xbest = cleaned;
                fbest = cv;
            }
        }

        bool take = false;
        if (best.x.size() == 0) {
            take = true;
        } else if (fbest > best.value + 1e-10 * (1.0 + std::abs(best.value))) {
            take = true;
        } else if (std::abs(fbest - best.value) <= 1e-10 * (1.0 + std::abs(best.value)) &&
                   std::lexicographical_compare(xbest.data(), xbest.data() + d, best.x.data(),
                                                best.x.data() + d)) {
            take = true;
        }
        if (take) {
            best.x = xbest;
            best.value = fbest;
        }
    }

    // certificate: norm of the projected supergradient step at the answer
    {
        Vector g(d);
        agg.value_and_supergradient(best.x, &g);
        const double t = 1e-7 * std::max(scale, 1.0);
        best.certificate = (proj.project(best.x + t * g) - best.x).norm() / t;
    }
    return best;
}

MasterResult solve_master(const ScenarioSet& scenarios, const ResourceInstance& instance,
                          const std::vector<DiscreteDistribution>& dists, double theta, double beta,
                          double lambda, double eps, std::uint64_t seed) {
    scenarios.validate();
    if (dists.empty()) throw Error("solve_master: distribution collection must be non-empty");
    for (const auto& p : dists) {
        p.validate();
        if (p.p.size() != scenarios.size())
            throw Error("solve_master: distribution length does not match scenario count");
    }
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    const Matrix mus = mu_table(inst, scenarios);
    const Eigen::Index m = inst.num_resources();
    const Eigen::Index n = scenarios.size();
    const std::size_t L = dists.size();

    std::vector<ComponentFn> comps;
    comps.reserve(L);
    for (const auto& p : dists)
        comps.push_back(make_expected_fairness_component(mus, p.p, beta, lambda));

    // pattern seeds: all-ones everywhere, greedy everywhere, plus a few
    // seeded random minimal combinations per distribution
    using PatternAssign = std::vector<IntMatrix>;
    auto assign_equal = [](const PatternAssign& a, const PatternAssign& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t l = 0; l < a.size(); ++l)
            if (!dense_equal(a[l], b[l])) return false;
        return true;
    };
    std::vector<PatternAssign> starts;
    {
        PatternAssign ones(L, IntMatrix::Ones(m, n));
        starts.push_back(ones);
        if (theta < 1.0) {
            PatternAssign greedy;
            greedy.reserve(L);
            for (const auto& p : dists)
                greedy.push_back(greedy_pattern(scenarios, inst, p.p, theta));
            if (!assign_equal(greedy, starts.front())) starts.push_back(std::move(greedy));

            std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
            std::vector<std::vector<IntMatrix>> cands(L);
            bool enumerable = true;
            for (std::size_t l = 0; l < L && enumerable; ++l) {
                cands[l] = pattern_search(scenarios, inst, dists[l], theta);
                if (cands[l].size() <= 1) enumerable = false;
            }
            if (enumerable) {
                for (int k = 0; k < 4; ++k) {
                    PatternAssign pick;
                    pick.reserve(L);
                    for (std::size_t l = 0; l < L; ++l)
                        pick.push_back(cands[l][rng() % cands[l].size()]);
                    starts.push_back(std::move(pick));
                }
            }
        }
    }

    AscentOptions opts;
    opts.eps = eps;
    opts.positive_floor = beta > 1.0;
    opts.seed = seed;

    MasterResult best;
    bool have_best = false;
    int restarts = 0;
    for (const PatternAssign& start : starts) {
        PatternAssign patterns = start;
        for (int round = 0; round < 4; ++round) {
            ++restarts;
            Matrix A;
            Vector b;
            build_capacity_rows(scenarios, inst,
                                [&](Eigen::Index i, Eigen::Index w) {
                                    for (const IntMatrix& z : patterns)
                                        if (z(i, w) == 1) return true;
                                    return false;
                                },
                                &A, &b);
            const AscentOutcome out = maximize_min_aggregate(comps, A, b, inst.allocation_upper, opts);
            if (std::isfinite(out.value)) {
                // the level is recomputed from scratch at the answer
                int active = 0;
                double level = std::numeric_limits<double>::infinity();
                for (std::size_t l = 0; l < L; ++l) {
                    const double v = comps[l](out.x, nullptr);
                    if (v < level) {
                        level = v;
                        active = static_cast<int>(l);
                    }
                }
                const bool better =
                    !have_best || level > best.level + 1e-10 * (1.0 + std::abs(best.level)) ||
                    (std::abs(level - best.level) <= 1e-10 * (1.0 + std::abs(best.level)) &&
                     std::lexicographical_compare(out.x.data(), out.x.data() + out.x.size(),
                                                  best.x.x.data(),
                                                  best.x.x.data() + best.x.x.size()));
                if (better) {
                    best.x.x = out.x;
                    best.level = level;
                    best.active_distribution = active;
                    best.patterns = patterns;
                    best.certificate = out.certificate;
                    have_best = true;
                }
            }
            // reselect patterns from the new point; keep mass >= theta by
            // re-adding the cheapest unsatisfied scenarios
            PatternAssign next;
            next.reserve(L);
            const IntMatrix sat = chance_indicators(out.x, scenarios, inst);
            for (std::size_t l = 0; l < L; ++l) {
                IntMatrix z = sat;
                for (Eigen::Index i = 0; i < m; ++i) {
                    double mass = 0.0;
                    for (Eigen::Index w = 0; w < n; ++w) mass += dists[l].p[w] * z(i, w);
                    if (mass >= theta - 1e-12) {
                        // drop satisfied scenarios that are not needed, most
                        // loaded first, to relax the next subproblem
                        std::vector<Eigen::Index> order;
                        for (Eigen::Index w = 0; w < n; ++w)
                            if (z(i, w) == 1) order.push_back(w);
                        std::sort(order.begin(), order.end(), [&](Eigen::Index a2, Eigen::Index b2) {
                            const double la =
                                scenarios.scenarios[static_cast<std::size_t>(a2)].row(i).dot(out.x);
                            const double lb =
                                scenarios.scenarios[static_cast<std::size_t>(b2)].row(i).dot(out.x);
                            return la > lb;
                        });
                        for (Eigen::Index w : order) {
                            if (mass - dists[l].p[w] >= theta - 1e-12) {
                                z(i, w) = 0;
                                mass -= dists[l].p[w];
                            }
                        }
                    } else {
                        // must constrain additional scenarios: cheapest
                        // violation first
                        std::vector<Eigen::Index> order;
                        for (Eigen::Index w = 0; w < n; ++w)
                            if (z(i, w) == 0 && dists[l].p[w] > 0.0) order.push_back(w);
                        std::sort(order.begin(), order.end(), [&](Eigen::Index a2, Eigen::Index b2) {
                            const double la =
                                scenarios.scenarios[static_cast<std::size_t>(a2)].row(i).dot(out.x);
                            const double lb =
                                scenarios.scenarios[static_cast<std::size_t>(b2)].row(i).dot(out.x);
                            return la < lb;
                        });
                        for (Eigen::Index w : order) {
                            z(i, w) = 1;
                            mass += dists[l].p[w];
                            if (mass >= theta - 1e-12) break;
                        }
                    }
                }
                next.push_back(std::move(z));
            }
            if (assign_equal(next, patterns)) break;
            patterns = std::move(next);
        }
    }

    if (!have_best)
        throw InfeasibleError("solve_master: objective non-finite at every start");
    best.restarts_used = restarts;
    return best;
}

}  // namespace fairalloc
