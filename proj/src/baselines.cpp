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

#include "fairalloc/baselines.hpp"

#include <chrono>
#include <cmath>

namespace fairalloc {

namespace {

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Alternating pattern selection / concave ascent for a single objective
// under one governing distribution (the EV and SAA shapes).
SolveReport pattern_constrained_solve(Model model, const ResourceInstance& instance,
                                      const ScenarioSet& scenarios, const ComponentFn& objective,
                                      const Vector& mass_p, double theta, double beta, double eps,
                                      std::uint64_t seed) {
    const Stopwatch clock;
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    const Eigen::Index m = inst.num_resources();
    const Eigen::Index n = scenarios.size();

    std::vector<IntMatrix> starts = {IntMatrix::Ones(m, n)};
    if (theta < 1.0) {
        DiscreteDistribution pd{mass_p};
        const auto cands = pattern_search(scenarios, inst, pd, theta);
        for (std::size_t k = 0; k < cands.size() && starts.size() < 8; ++k) {
            bool dup = false;
            for (const auto& s : starts) dup = dup || dense_equal(s, cands[k]);
            if (!dup) starts.push_back(cands[k]);
        }
    }

    AscentOptions opts;
    opts.eps = eps;
    opts.positive_floor = beta > 1.0;
    opts.seed = seed;

    const std::vector<ComponentFn> comps = {objective};
    Vector best_x;
    double best_v = -std::numeric_limits<double>::infinity();
    for (const IntMatrix& start : starts) {
        IntMatrix pattern = start;
        for (int round = 0; round < 4; ++round) {
            Matrix A;
            Vector b;
            build_capacity_rows(scenarios, inst,
                                [&](Eigen::Index i, Eigen::Index w) { return pattern(i, w) == 1; },
                                &A, &b);
            const AscentOutcome out =
                maximize_min_aggregate(comps, A, b, inst.allocation_upper, opts);
            if (std::isfinite(out.value) &&
                (out.value > best_v + 1e-12 ||
                 (best_x.size() == 0 && out.value > -std::numeric_limits<double>::infinity()))) {
                best_v = out.value;
                best_x = out.x;
            }
            // re-anchor the pattern at the new point
            IntMatrix z = chance_indicators(out.x, scenarios, inst);
            for (Eigen::Index i = 0; i < m; ++i) {
                double mass = 0.0;
                for (Eigen::Index w = 0; w < n; ++w) mass += mass_p[w] * z(i, w);
                if (mass < theta - 1e-12) {
                    // constrain the cheapest unsatisfied scenarios back in
                    std::vector<Eigen::Index> order;
                    for (Eigen::Index w = 0; w < n; ++w)
                        if (z(i, w) == 0 && mass_p[w] > 0.0) order.push_back(w);
                    std::sort(order.begin(), order.end(), [&](Eigen::Index a2, Eigen::Index b2) {
                        return scenarios.scenarios[static_cast<std::size_t>(a2)].row(i).dot(out.x) <
                               scenarios.scenarios[static_cast<std::size_t>(b2)].row(i).dot(out.x);
                    });
                    for (Eigen::Index w : order) {
                        z(i, w) = 1;
                        mass += mass_p[w];
                        if (mass >= theta - 1e-12) break;
                    }
                }
            }
            if (dense_equal(z, pattern)) break;
            pattern = std::move(z);
        }
    }
    if (!std::isfinite(best_v))
        throw InfeasibleError("baseline solve: objective non-finite at every start");

    SolveReport report;
    report.model = model;
    report.allocation.x = best_x;
    report.objective = best_v;
    report.iterations = 1;
    report.scenario_pattern = chance_indicators(best_x, scenarios, inst);
    report.seed = seed;
    report.wall_time = clock.seconds();
    report.validate();
    return report;
}

}  // namespace

SolveReport solve_ev(const ResourceInstance& instance, const ScenarioSet& scenarios,
                     const DiscreteDistribution& truth_p, const FairnessParams& params,
                     std::uint64_t seed, const BaselineOptions& options) {
    params.validate();
    truth_p.validate();
    if (truth_p.p.size() != scenarios.size())
        throw Error("solve_ev: truth_p length does not match scenario count");
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);

    // fairness evaluated at the mean requirement matrix
    Matrix mean = Matrix::Zero(scenarios.num_resources(), scenarios.num_users());
    for (Eigen::Index w = 0; w < scenarios.size(); ++w)
        mean += truth_p.p[w] * scenarios.scenarios[static_cast<std::size_t>(w)];
    const Vector mu = derive_shares(inst, mean).mu;
    Matrix mu_row(1, mu.size());
    mu_row.row(0) = mu.transpose();
    const ComponentFn objective = make_expected_fairness_component(
        mu_row, Vector::Ones(1), params.beta, params.effective_lambda());

    const double theta = options.ev_theta_complement ? 1.0 - params.theta : params.theta;
    return pattern_constrained_solve(Model::ev, inst, scenarios, objective, truth_p.p, theta,
                                     params.beta, params.epsilon, seed);
}

SolveReport solve_robust(const ResourceInstance& instance, const ScenarioSet& scenarios,
                         const FairnessParams& params, std::uint64_t seed) {
    params.validate();
    scenarios.validate();
    const Stopwatch clock;
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    const Matrix mus = mu_table(inst, scenarios);
    const Eigen::Index n = scenarios.size();

    // min over scenarios in the objective, every scenario in the rows
    std::vector<ComponentFn> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index w = 0; w < n; ++w) {
        Vector e = Vector::Zero(n);
        e[w] = 1.0;
        comps.push_back(
            make_expected_fairness_component(mus, e, params.beta, params.effective_lambda()));
    }
    Matrix A;
    Vector b;
    build_capacity_rows(scenarios, inst, [](Eigen::Index, Eigen::Index) { return true; }, &A, &b);

    AscentOptions opts;
    opts.eps = params.epsilon;
    opts.positive_floor = params.beta > 1.0;
    opts.seed = seed;
    const AscentOutcome out = maximize_min_aggregate(comps, A, b, inst.allocation_upper, opts);
    if (!std::isfinite(out.value)) throw InfeasibleError("solve_robust: objective non-finite");

    SolveReport report;
    report.model = Model::robust;
    report.allocation.x = out.x;
    report.objective = out.value;
    report.iterations = 1;
    report.scenario_pattern = chance_indicators(out.x, scenarios, inst);
    report.seed = seed;
    report.wall_time = clock.seconds();
    report.validate();
    return report;
}

SolveReport solve_saa(const ResourceInstance& instance, const ScenarioSet& scenarios,
                      const FairnessParams& params, std::uint64_t seed) {
    params.validate();
    scenarios.validate();
    const ResourceInstance inst = with_allocation_upper(instance, scenarios);
    const Matrix mus = mu_table(inst, scenarios);
    const Vector uniform = Vector::Constant(scenarios.size(), 1.0 / scenarios.size());
    const ComponentFn objective =
        make_expected_fairness_component(mus, uniform, params.beta, params.effective_lambda());
    SolveReport report = pattern_constrained_solve(Model::saa, inst, scenarios, objective, uniform,
                                                   params.theta, params.beta, params.epsilon, seed);
    return report;
}

SolveReport solve_fds(const ResourceInstance& instance, const Matrix& requirements,
                      const FairnessParams& params, std::uint64_t seed) {
    params.validate();
    ScenarioSet single;
    single.scenarios.push_back(requirements);
    single.validate();
    const ResourceInstance inst = with_allocation_upper(instance, single);
    const Matrix mus = mu_table(inst, single);
    const ComponentFn objective = make_expected_fairness_component(
        mus, Vector::Ones(1), params.beta, params.effective_lambda());
    SolveReport report = pattern_constrained_solve(Model::fds, inst, single, objective,
                                                   Vector::Ones(1), 1.0, params.beta,
                                                   params.epsilon, seed);
    report.model = Model::fds;
    return report;
}

Vector leftovers(const SolveReport& report, const ScenarioSet& scenarios,
                 const ResourceInstance& instance, const DiscreteDistribution& truth_p) {
    truth_p.validate();
    if (truth_p.p.size() != scenarios.size())
        throw Error("leftovers: truth_p length does not match scenario count");
    const Vector& x = report.allocation.x;
    Vector out = Vector::Zero(instance.num_resources());
    for (Eigen::Index w = 0; w < scenarios.size(); ++w) {
        const Vector load = scenarios.scenarios[static_cast<std::size_t>(w)] * x;
        out += truth_p.p[w] * (instance.capacities - load).cwiseMax(0.0);
    }
    return out;
}

}  // namespace fairalloc
