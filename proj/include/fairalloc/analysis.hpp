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

#include "fairalloc/baselines.hpp"
#include "fairalloc/cutting.hpp"

namespace fairalloc {

// Critical values used by the bound estimators.
inline constexpr double kZCritical05 = 1.64;        // Phi^-1(0.95)
inline constexpr double kTCritical05Nu4 = 2.13;     // t_{0.05, 4}, the M = 5 default

/// One-sided 0.05 t critical value for nu in [1, 30]; nu = 4 returns the
/// named constant above.
double t_critical_05(int nu);

struct SharingIncentiveEntry {
    double expected_dominant_share = 0.0;  // sum_w p^w mu_j^w x_j
    bool pass = false;                     // >= 1/d - 1e-8
};

struct EnvyViolation {
    Eigen::Index envious = 0;  // j envies k
    Eigen::Index envied = 0;
    double min_margin = 0.0;   // smallest eta_ik x_k - eta_ij x_j over (i, w)
};

struct ParetoSpot {
    int trials = 0;
    int violations = 0;
    bool guarantee_applies = false;  // |lambda| >= |(1-beta)/beta|
};

struct PropertyReport {
    std::vector<SharingIncentiveEntry> sharing_incentive;
    bool sharing_incentive_pass = false;
    std::vector<EnvyViolation> envy;
    ParetoSpot pareto_spot;

    bool all_pass() const { return sharing_incentive_pass && envy.empty() && pareto_spot.violations == 0; }
};

/// Expected dominant share per user under p_hat with the 1/d threshold.
std::vector<SharingIncentiveEntry> check_sharing_incentive(const Vector& x,
                                                           const ScenarioSet& scenarios,
                                                           const DiscreteDistribution& p_hat,
                                                           const ResourceInstance& instance);

/// User j envies k iff eta_ik^w x_k >= eta_ij^w x_j for every resource and
/// scenario with at least one strict inequality.
std::vector<EnvyViolation> check_envy(const Vector& x, const ScenarioSet& scenarios,
                                      const ResourceInstance& instance);

/// Samples allocations Pareto-dominated by x (componentwise reductions)
/// and counts scenarios where F fails to strictly prefer x.
ParetoSpot check_pareto_spot(const Vector& x, const ScenarioSet& scenarios,
                             const ResourceInstance& instance, const FairnessParams& params,
                             int trials, std::uint64_t seed);

/// Runs all three property checks against a solve report.
PropertyReport check_properties(const SolveReport& report, const ScenarioSet& scenarios,
                                const ResourceInstance& instance, const FairnessParams& params,
                                int pareto_trials = 200, std::uint64_t seed = 0);

struct BetaSweepResult {
    std::vector<double> betas;
    std::vector<double> values;
    bool monotone_nonincreasing = false;  // within 1e-3 slack
    // coupled mode only: closed-form max-ratio evaluation at the largest
    // beta's optimum, for the beta -> infinity comparison
    std::optional<double> max_ratio_proxy;
};

/// Optimal values across a strictly increasing beta > 1 grid; solve_fn
/// receives the per-beta parameters and returns a finished report.
BetaSweepResult beta_sweep(const std::function<SolveReport(const FairnessParams&)>& solve_fn,
                           const std::vector<double>& betas, LambdaMode mode, double fixed_lambda,
                           double theta, double epsilon,
                           const ScenarioSet* scenarios_for_proxy = nullptr,
                           const ResourceInstance* instance_for_proxy = nullptr);

enum class BoundsMode { saa_point, dr_replicate };

struct BoundsReport {
    double lower = 0.0;
    double upper = 0.0;
    double point_estimate = 0.0;
    double gap_percent = 0.0;
    int replicates = 0;
    std::vector<double> replicate_values;        // optimal values per replicate
    std::vector<double> replicate_lower_values;  // dr_replicate inner evaluations
    double z_critical = kZCritical05;
    double t_critical = kTCritical05Nu4;
};

/// gap = |L - U| / |point| * 100.
double gap_percent(double lower, double upper, double point_estimate);

struct BoundsSetup {
    GeneratorSpec generator;          // scenario source; replicate r uses seed + r
    FairnessParams params;
    double delta = 0.0;               // SA-DR ambiguity size (dr_replicate mode)
    int replicates = 5;               // M
    BoundsMode mode = BoundsMode::saa_point;
    std::uint64_t solver_seed = 0;
};

/// Statistical lower/upper bound estimators around a solved model.
///
/// saa_point: solve the SAA once on the base sample; L = fhat(xhat) -
/// z_0.05 sigma_hat on an independent evaluation sample, U = mean of M
/// replicate optimal values + t_{0.05, M-1} sigma.  dr_replicate: the
/// lower bound instead averages M replicate inner evaluations at xhat
/// with the t critical value.
BoundsReport confidence_bounds(const ResourceInstance& instance, const BoundsSetup& setup);

}  // namespace fairalloc
