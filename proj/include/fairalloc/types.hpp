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

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairalloc {

using Matrix = Eigen::MatrixXd;  // resources (rows) x users (cols)
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

/// Base error for all domain failures.  Messages name the offending field.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The model admits no feasible point for the given parameters.
struct InfeasibleError : Error {
    using Error::Error;
};

/// File access or parse failure (distinct exit code in the CLI).
struct IoError : Error {
    using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
struct NonConvergenceError : Error {
    using Error::Error;
};

// Relative slack on capacity checks; keeps binary satisfaction indicators
// stable under round-off.
inline constexpr double kCapacityRelSlack = 1e-9;

// A probability vector must sum to 1 within this tolerance.
inline constexpr double kDistributionSumTol = 1e-9;

/// Deterministic skeleton shared by every model: who is competing for what.
///
/// Requirements live in scenario matrices, not here; the instance only pins
/// the capacities c_i, the number of users and the allocation box [0, xbar].
/// When `allocation_upper` is empty it can be derived from a scenario set
/// via default_allocation_upper().
struct ResourceInstance {
    Eigen::Index users = 0;
    Vector capacities;                        // length m, all > 0
    Vector allocation_upper;                  // length d or empty (unset)
    std::vector<std::string> user_labels;     // optional, length d when set
    std::vector<std::string> resource_labels; // optional, length m when set

    Eigen::Index num_users() const { return users; }
    Eigen::Index num_resources() const { return capacities.size(); }
    bool has_allocation_upper() const { return allocation_upper.size() > 0; }

    void validate() const;
};

/// Finite sampled support: |Omega| pairwise-distinct m x d requirement
/// matrices with non-negative entries and no all-zero user column.
struct ScenarioSet {
    std::vector<Matrix> scenarios;

    Eigen::Index size() const { return static_cast<Eigen::Index>(scenarios.size()); }
    Eigen::Index num_resources() const { return scenarios.empty() ? 0 : scenarios.front().rows(); }
    Eigen::Index num_users() const { return scenarios.empty() ? 0 : scenarios.front().cols(); }

    void validate() const;
};

struct Allocation {
    Vector x;  // length d, 0 <= x_j <= xbar_j

    void validate(const ResourceInstance& instance) const;
};

/// Probability vector over the scenarios of a ScenarioSet.
struct DiscreteDistribution {
    Vector p;

    void validate() const;

    static DiscreteDistribution uniform(Eigen::Index n);
    static DiscreteDistribution point_mass(Eigen::Index n, Eigen::Index at);
};

enum class LambdaMode { explicit_value, coupled };

/// Fairness coefficient beta, efficiency coefficient lambda, chance
/// probability theta and solver tolerance epsilon.
///
/// In coupled mode lambda is tied to beta as (1 - beta) / beta, the regime
/// in which the combined objective reduces to a power sum of dominant
/// shares and the solvers have a concavity certificate.
struct FairnessParams {
    double beta = 2.0;
    double lambda = -0.5;
    LambdaMode lambda_mode = LambdaMode::explicit_value;
    double theta = 1.0;
    double epsilon = 1e-6;

    double effective_lambda() const {
        return lambda_mode == LambdaMode::coupled ? (1.0 - beta) / beta : lambda;
    }
    bool is_coupled() const {
        return lambda_mode == LambdaMode::coupled ||
               std::abs(lambda - (1.0 - beta) / beta) <= 1e-12;
    }

    void validate() const;

    static FairnessParams coupled(double beta, double theta = 1.0, double epsilon = 1e-6) {
        FairnessParams p;
        p.beta = beta;
        p.lambda_mode = LambdaMode::coupled;
        p.theta = theta;
        p.epsilon = epsilon;
        return p;
    }
};

enum class Model { fds, ev, robust, saa, sadr };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

/// Exact elementwise equality for dense Eigen objects.
template <typename D1, typename D2>
bool dense_equal(const Eigen::DenseBase<D1>& a, const Eigen::DenseBase<D2>& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.derived().array() == b.derived().array()).all();
}

/// Everything a solve produces: the allocation, the binding worst-case
/// distribution (SA-DR only), the objective estimate and diagnostics.
struct SolveReport {
    Model model = Model::fds;
    Allocation allocation;
    std::optional<DiscreteDistribution> worst_case;
    double objective = 0.0;
    std::vector<double> inner_value_history;
    int iterations = 0;
    IntMatrix scenario_pattern;  // m x |Omega| satisfaction flags at the final x
    double wall_time = 0.0;      // seconds
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    void validate() const;
};

}  // namespace fairalloc
