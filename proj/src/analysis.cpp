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

#include "fairalloc/analysis.hpp"

#include <cmath>
#include <future>
#include <random>
#include <sstream>

namespace fairalloc {

double t_critical_05(int nu) {
    // one-sided 0.05 critical values, nu = 1..30
    static const double table[30] = {
        6.314, 2.920, 2.353, kTCritical05Nu4, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
        1.796, 1.782, 1.771, 1.761,           1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
        1.721, 1.717, 1.714, 1.711,           1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
    if (nu < 1 || nu > 30)
        throw Error("t_critical_05: degrees of freedom must lie in [1, 30], got " +
                    std::to_string(nu));
    return table[nu - 1];
}

std::vector<SharingIncentiveEntry> check_sharing_incentive(const Vector& x,
                                                           const ScenarioSet& scenarios,
                                                           const DiscreteDistribution& p_hat,
                                                           const ResourceInstance& instance) {
    p_hat.validate();
    if (p_hat.p.size() != scenarios.size())
        throw Error("check_sharing_incentive: distribution length does not match scenarios");
    const Matrix mus = mu_table(instance, scenarios);
    const Eigen::Index d = instance.num_users();
    const double threshold = 1.0 / static_cast<double>(d) - 1e-8;

    std::vector<SharingIncentiveEntry> out(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        double v = 0.0;
        for (Eigen::Index w = 0; w < scenarios.size(); ++w) v += p_hat.p[w] * mus(w, j) * x[j];
        out[static_cast<std::size_t>(j)] = {v, v >= threshold};
    }
    return out;
}

std::vector<EnvyViolation> check_envy(const Vector& x, const ScenarioSet& scenarios,
                                      const ResourceInstance& instance) {
    const Eigen::Index d = instance.num_users();
    const Eigen::Index m = instance.num_resources();
    std::vector<EnvyViolation> out;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            if (j == k) continue;
            bool all_geq = true;
            bool any_strict = false;
            double min_margin = std::numeric_limits<double>::infinity();
            for (const Matrix& r : scenarios.scenarios) {
                for (Eigen::Index i = 0; i < m && all_geq; ++i) {
                    const double own = r(i, j) / instance.capacities[i] * x[j];
                    const double other = r(i, k) / instance.capacities[i] * x[k];
                    const double margin = other - own;
                    min_margin = std::min(min_margin, margin);
                    if (margin < 0.0) all_geq = false;
                    if (margin > 0.0) any_strict = true;
                }
                if (!all_geq) break;
            }
            if (all_geq && any_strict) out.push_back({j, k, min_margin});
        }
    }
    return out;
}

ParetoSpot check_pareto_spot(const Vector& x, const ScenarioSet& scenarios,
                             const ResourceInstance& instance, const FairnessParams& params,
                             int trials, std::uint64_t seed) {
    const double beta = params.beta;
    const double lambda = params.effective_lambda();
    ParetoSpot spot;
    spot.guarantee_applies = std::abs(lambda) >= std::abs((1.0 - beta) / beta) - 1e-12;

    const Matrix mus = mu_table(instance, scenarios);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> shrink(0.3, 0.999);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int t = 0; t < trials; ++t) {
        Vector y = x;
        bool reduced = false;
        for (int attempt = 0; attempt < 20 && !reduced; ++attempt) {
            y = x;
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                if (x[j] > 0.0 && unif(rng) < 0.5) {
                    y[j] = x[j] * shrink(rng);
                    reduced = true;
                }
            }
        }
        if (!reduced) continue;  // x is the zero allocation; nothing to dominate
        ++spot.trials;
        bool ok = true;
        for (Eigen::Index w = 0; w < scenarios.size(); ++w) {
            const double fx = eval_fairness(x, mus.row(w).transpose(), beta, lambda).value;
            const double fy = eval_fairness(y, mus.row(w).transpose(), beta, lambda).value;
            if (!(fx > fy)) {
                ok = false;
                break;
            }
        }
        if (!ok) ++spot.violations;
    }
    return spot;
}

PropertyReport check_properties(const SolveReport& report, const ScenarioSet& scenarios,
                                const ResourceInstance& instance, const FairnessParams& params,
                                int pareto_trials, std::uint64_t seed) {
    const DiscreteDistribution p_hat = report.worst_case.has_value()
                                           ? *report.worst_case
                                           : DiscreteDistribution::uniform(scenarios.size());
    PropertyReport out;
    out.sharing_incentive =
        check_sharing_incentive(report.allocation.x, scenarios, p_hat, instance);
    out.sharing_incentive_pass = true;
    for (const auto& e : out.sharing_incentive) out.sharing_incentive_pass &= e.pass;
    out.envy = check_envy(report.allocation.x, scenarios, instance);
    out.pareto_spot =
        check_pareto_spot(report.allocation.x, scenarios, instance, params, pareto_trials, seed);
    return out;
}

BetaSweepResult beta_sweep(const std::function<SolveReport(const FairnessParams&)>& solve_fn,
                           const std::vector<double>& betas, LambdaMode mode, double fixed_lambda,
                           double theta, double epsilon, const ScenarioSet* scenarios_for_proxy,
                           const ResourceInstance* instance_for_proxy) {
    if (betas.empty()) throw Error("beta_sweep: empty beta grid");
    for (std::size_t k = 0; k < betas.size(); ++k) {
        if (betas[k] <= 1.0) throw Error("beta_sweep: betas must all exceed 1");
        if (k > 0 && betas[k] <= betas[k - 1])
            throw Error("beta_sweep: betas must be strictly increasing");
    }
    BetaSweepResult out;
    out.betas = betas;
    SolveReport last;
    for (double beta : betas) {
        FairnessParams p;
        p.beta = beta;
        p.lambda = fixed_lambda;
        p.lambda_mode = mode;
        p.theta = theta;
        p.epsilon = epsilon;
        last = solve_fn(p);
        out.values.push_back(last.objective);
    }
    out.monotone_nonincreasing = true;
    for (std::size_t k = 1; k < out.values.size(); ++k)
        if (out.values[k] > out.values[k - 1] + 1e-3) out.monotone_nonincreasing = false;

    if (mode == LambdaMode::coupled && scenarios_for_proxy != nullptr &&
        instance_for_proxy != nullptr) {
        const double beta_last = betas.back();
        const double lambda_last = (1.0 - beta_last) / beta_last;
        const Matrix mus = mu_table(*instance_for_proxy, *scenarios_for_proxy);
        const DiscreteDistribution p = last.worst_case.has_value()
                                           ? *last.worst_case
                                           : DiscreteDistribution::uniform(mus.rows());
        double proxy = 0.0;
        for (Eigen::Index w = 0; w < mus.rows(); ++w) {
            if (p.p[w] <= 0.0) continue;
            proxy += p.p[w] * eval_special(last.allocation.x, mus.row(w).transpose(),
                                           FairnessRegime::max_ratio_inf, lambda_last);
        }
        out.max_ratio_proxy = proxy;
    }
    return out;
}

double gap_percent(double lower, double upper, double point_estimate) {
    if (point_estimate == 0.0) throw Error("gap_percent: zero point estimate");
    return std::abs(lower - upper) / std::abs(point_estimate) * 100.0;
}

namespace {

// sigma_hat^2 = 1/(N(N-1)) sum (v - mean)^2, the standard error form
double standard_error(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n <= 1) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

}  // namespace

BoundsReport confidence_bounds(const ResourceInstance& instance, const BoundsSetup& setup) {
    if (setup.replicates < 2) throw Error("confidence_bounds: need at least 2 replicates");
    setup.params.validate();

    BoundsReport out;
    out.replicates = setup.replicates;
    out.t_critical = t_critical_05(setup.replicates - 1);

    const ScenarioSet base = generate(setup.generator);
    const double beta = setup.params.beta;
    const double lambda = setup.params.effective_lambda();

    auto replicate_spec = [&](int r) {
        GeneratorSpec g = setup.generator;
        g.seed = setup.generator.seed + static_cast<std::uint64_t>(r);
        return g;
    };

    if (setup.mode == BoundsMode::saa_point) {
        const SolveReport base_solve = solve_saa(instance, base, setup.params, setup.solver_seed);
        out.point_estimate = base_solve.objective;

        // lower bound: sample mean and standard error of F(xhat, .) on an
        // independent evaluation sample
        const ScenarioSet eval_set =
            generate(replicate_spec(setup.replicates + 1));
        const ResourceInstance inst = with_allocation_upper(instance, eval_set);
        const Matrix mus = mu_table(inst, eval_set);
        std::vector<double> fvals;
        fvals.reserve(static_cast<std::size_t>(eval_set.size()));
        for (Eigen::Index w = 0; w < eval_set.size(); ++w)
            fvals.push_back(
                eval_fairness(base_solve.allocation.x, mus.row(w).transpose(), beta, lambda).value);
        double fhat = 0.0;
        for (double v : fvals) fhat += v;
        fhat /= static_cast<double>(fvals.size());
        out.lower = fhat - kZCritical05 * standard_error(fvals);

        // upper bound: replicate optimal values with the t critical value
        std::vector<std::future<double>> jobs;
        for (int r = 1; r <= setup.replicates; ++r) {
            jobs.push_back(std::async(std::launch::async, [&, r]() {
                const ScenarioSet rep = generate(replicate_spec(r));
                return solve_saa(instance, rep, setup.params, setup.solver_seed).objective;
            }));
        }
        for (int r = 0; r < setup.replicates; ++r) {
            try {
                out.replicate_values.push_back(jobs[static_cast<std::size_t>(r)].get());
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "confidence_bounds: replicate " << (r + 1) << " failed after "
                   << out.replicate_values.size() << " successes: " << e.what();
                throw Error(os.str());
            }
        }
        double vmean = 0.0;
        for (double v : out.replicate_values) vmean += v;
        vmean /= static_cast<double>(out.replicate_values.size());
        out.upper = vmean + out.t_critical * standard_error(out.replicate_values);
    } else {
        // dr_replicate: base SA-DR solve, then replicate inner evaluations
        // at xhat (lower) and replicate SA-DR solves (upper)
        const SampleMoments base_mom = sample_moments(base);
        const MomentAmbiguity base_set =
            from_moments(base_mom.mean, base_mom.variance, setup.delta);
        const SadrResult base_solve =
            solve_sadr(instance, base, base_set, setup.params, setup.solver_seed);
        out.point_estimate = base_solve.report.objective;
        const Vector xhat = base_solve.report.allocation.x;

        struct Rep {
            double inner_value;
            double optimal_value;
        };
        std::vector<std::future<Rep>> jobs;
        for (int r = 1; r <= setup.replicates; ++r) {
            jobs.push_back(std::async(std::launch::async, [&, r]() -> Rep {
                const ScenarioSet rep = generate(replicate_spec(r));
                const SampleMoments mom = sample_moments(rep);
                const MomentAmbiguity set = from_moments(mom.mean, mom.variance, setup.delta);
                const ResourceInstance inst = with_allocation_upper(instance, rep);
                const InnerResult q =
                    solve_inner(xhat, rep, inst, set, setup.params.theta, beta, lambda,
                                setup.params.epsilon, setup.solver_seed + 77);
                const SadrResult solved =
                    solve_sadr(instance, rep, set, setup.params, setup.solver_seed);
                return {q.value, solved.report.objective};
            }));
        }
        for (int r = 0; r < setup.replicates; ++r) {
            try {
                const Rep rep = jobs[static_cast<std::size_t>(r)].get();
                out.replicate_lower_values.push_back(rep.inner_value);
                out.replicate_values.push_back(rep.optimal_value);
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "confidence_bounds: replicate " << (r + 1) << " failed after "
                   << out.replicate_values.size() << " successes: " << e.what();
                throw Error(os.str());
            }
        }
        double qmean = 0.0;
        for (double v : out.replicate_lower_values) qmean += v;
        qmean /= static_cast<double>(out.replicate_lower_values.size());
        out.lower = qmean - out.t_critical * standard_error(out.replicate_lower_values);

        double vmean = 0.0;
        for (double v : out.replicate_values) vmean += v;
        vmean /= static_cast<double>(out.replicate_values.size());
        out.upper = vmean + out.t_critical * standard_error(out.replicate_values);
    }

    out.gap_percent = gap_percent(out.lower, out.upper, out.point_estimate);
    return out;
}

}  // namespace fairalloc
