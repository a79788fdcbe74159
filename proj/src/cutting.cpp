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

#include "fairalloc/cutting.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fairalloc {

void CutLog::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cutlog: cannot write '" + path + "'");
    out << "iteration,level,separation_value,wall_time\n";
    char buf[160];
    for (const CutRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.6f\n", r.iteration, r.master_level,
                      r.separation_value, r.wall_time);
        out << buf;
    }
}

namespace {

double total_variation(const Vector& a, const Vector& b) {
    return 0.5 * (a - b).cwiseAbs().sum();
}

}  // namespace

SadrResult solve_sadr(const ResourceInstance& instance, const ScenarioSet& scenarios,
                      const MomentAmbiguity& set, const FairnessParams& params, std::uint64_t seed,
                      const SadrOptions& options) {
    params.validate();
    scenarios.validate();
    set.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    const double beta = params.beta;
    const double lambda = params.effective_lambda();
    const double eps = params.epsilon;

    SadrResult out;
    SolveReport& report = out.report;
    report.model = Model::sadr;
    report.seed = seed;
    if (!params.is_coupled() || beta <= 1.0)
        report.warnings.push_back(
            "master lacks a concavity certificate outside the coupled beta > 1 regime; "
            "result is heuristic");

    // seed collection: uniform if the moment set admits it, else the
    // restoration distribution (an empty collection leaves the first
    // master unbounded)
    std::vector<DiscreteDistribution> cuts = options.initial_cuts;
    if (cuts.empty())
        cuts.push_back(moment_feasible_distribution(scenarios, set, eps, seed));

    Vector x;
    double level = 0.0;
    InnerResult inner;
    bool converged = false;
    int t = 0;
    for (; t < options.max_iterations; ++t) {
        const MasterResult master = solve_master(scenarios, inst, cuts, params.theta, beta, lambda,
                                                 eps, seed + static_cast<std::uint64_t>(t));
        x = master.x.x;
        level = master.level;

        // chance separation: the chance constraint must hold under every
        // distribution in the moment set, not just the collected ones; a
        // violating distribution becomes a cut whose pattern constraints
        // exclude x
        if (params.theta > 0.0) {
            std::vector<DiscreteDistribution> argmins;
            const Vector masses = worst_chance_masses(x, scenarios, inst, set, eps,
                                                      seed + 5000 + static_cast<std::uint64_t>(t),
                                                      &argmins);
            Eigen::Index worst_i = 0;
            const double worst = masses.minCoeff(&worst_i);
            if (worst < params.theta - eps / 2.0 &&
                argmins[static_cast<std::size_t>(worst_i)].p.size() > 0) {
                const DiscreteDistribution& repair = argmins[static_cast<std::size_t>(worst_i)];
                bool duplicate = false;
                for (const auto& c : cuts)
                    if (total_variation(c.p, repair.p) <= 1e-8) duplicate = true;
                if (!duplicate) {
                    cuts.push_back(repair);
                    out.log.records.push_back({t, level, worst - params.theta, true, elapsed()});
                    continue;
                }
                report.warnings.push_back(
                    "duplicate chance-separating distribution; stopped with chance margin " +
                    std::to_string(worst - params.theta));
            }
        }

        bool added = false;
        double g = 0.0;
        try {
            inner = solve_inner(x, scenarios, inst, set, params.theta, beta, lambda, eps,
                                seed + 1000 + static_cast<std::uint64_t>(t));
            g = inner.value - level;
        } catch (const InfeasibleError&) {
            // No moment-feasible distribution is chance-feasible at x: cut
            // the point away with a moment-feasible distribution whose
            // chance constraint x violates.
            DiscreteDistribution repair = moment_feasible_distribution(scenarios, set, eps, seed + t);
            bool duplicate = false;
            for (const auto& c : cuts)
                if (total_variation(c.p, repair.p) <= 1e-8) duplicate = true;
            if (duplicate)
                throw InfeasibleError(
                    "solve_sadr: model infeasible at this theta (inner infeasible at every master "
                    "candidate)");
            cuts.push_back(std::move(repair));
            out.log.records.push_back({t, level, 0.0, true, elapsed()});
            continue;
        }

        report.inner_value_history.push_back(inner.value);
        if (g >= -eps / 2.0) {
            out.log.records.push_back({t, level, g, false, elapsed()});
            converged = true;
            break;
        }
        bool duplicate = false;
        for (const auto& c : cuts)
            if (total_variation(c.p, inner.p.p) <= 1e-8) duplicate = true;
        if (duplicate) {
            // inner noise: a repeated cut cannot improve the master
            out.log.records.push_back({t, level, g, false, elapsed()});
            report.warnings.push_back("duplicate separating distribution; stopped with gap " +
                                      std::to_string(g));
            converged = true;
            break;
        }
        cuts.push_back(inner.p);
        added = true;
        out.log.records.push_back({t, level, g, added, elapsed()});
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_sadr: no convergence in " << options.max_iterations << " iterations (last gap "
           << (out.log.records.empty() ? 0.0 : out.log.records.back().separation_value) << ")";
        throw NonConvergenceError(os.str());
    }

    report.allocation.x = x;
    report.objective = level;
    report.worst_case = inner.p;
    report.iterations = t + 1;
    report.scenario_pattern = chance_indicators(x, scenarios, inst);
    report.wall_time = elapsed();
    report.validate();
    return out;
}

std::pair<double, bool> verify_certificate(const SolveReport& report,
                                           const ResourceInstance& instance,
                                           const ScenarioSet& scenarios, const MomentAmbiguity& set,
                                           const FairnessParams& params,
                                           std::uint64_t fresh_seed) {
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    double g;
    try {
        const InnerResult fresh =
            solve_inner(report.allocation.x, scenarios, inst, set, params.theta, params.beta,
                        params.effective_lambda(), params.epsilon, fresh_seed);
        g = fresh.value - report.objective;
    } catch (const InfeasibleError&) {
        return {-std::numeric_limits<double>::infinity(), false};
    }
    bool chance_ok = true;
    if (params.theta > 0.0) {
        const Vector masses =
            worst_chance_masses(report.allocation.x, scenarios, inst, set, params.epsilon,
                                fresh_seed + 1, nullptr);
        chance_ok = masses.minCoeff() >= params.theta - params.epsilon;
    }
    return {g, g >= -params.epsilon && chance_ok};
}

}  // namespace fairalloc
