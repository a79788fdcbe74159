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

#include "fairalloc/types.hpp"

#include <sstream>

namespace fairalloc {

/// Per-resource shares eta_ij = r_ij / c_i and per-user dominant
/// requirements mu_j = max_i eta_ij.
struct Shares {
    Matrix eta;  // m x d
    Vector mu;   // d, all > 0
};

namespace detail {
inline void check_scenario_dims(Eigen::Index rows, Eigen::Index cols,
                                const ResourceInstance& instance) {
    if (rows != instance.num_resources() || cols != instance.num_users()) {
        std::ostringstream os;
        os << "scenario shape " << rows << "x" << cols << " does not match instance ("
           << instance.num_resources() << " resources, " << instance.num_users() << " users)";
        throw Error(os.str());
    }
}
}  // namespace detail

/// eta_ij = r_ij / c_i, mu_j = max_i eta_ij.  Errors if a user requires
/// nothing anywhere (mu_j = 0 leaves the dominant share undefined).
template <typename Derived>
Shares derive_shares(const ResourceInstance& instance, const Eigen::MatrixBase<Derived>& scenario) {
    detail::check_scenario_dims(scenario.rows(), scenario.cols(), instance);
    Shares s;
    s.eta = scenario.derived().template cast<double>().array().colwise() /
            instance.capacities.array();
    s.mu = s.eta.colwise().maxCoeff();
    for (Eigen::Index j = 0; j < s.mu.size(); ++j) {
        if (!(s.mu[j] > 0.0)) {
            std::ostringstream os;
            os << "derive_shares: user " << j << " has all-zero requirements";
            throw Error(os.str());
        }
    }
    return s;
}

/// Entry i is true iff sum_j r_ij x_j <= c_i up to the relative slack.
template <typename Derived>
Eigen::Array<bool, Eigen::Dynamic, 1> capacity_satisfied(const Vector& x,
                                                         const Eigen::MatrixBase<Derived>& scenario,
                                                         const Vector& capacities) {
    if (scenario.cols() != x.size() || scenario.rows() != capacities.size()) {
        std::ostringstream os;
        os << "capacity_satisfied: scenario shape " << scenario.rows() << "x" << scenario.cols()
           << " incompatible with x (" << x.size() << ") and capacities (" << capacities.size() << ")";
        throw Error(os.str());
    }
    const Vector load = scenario.derived() * x;
    return load.array() <= capacities.array() * (1.0 + kCapacityRelSlack);
}

/// Dominant requirements of every scenario stacked row-wise: row w holds
/// mu^w (length d).  The solvers evaluate everything off this table.
Matrix mu_table(const ResourceInstance& instance, const ScenarioSet& scenarios);

/// Default allocation box: xbar_j = 2 * min_i c_i / rmin_ij, where rmin_ij
/// is user j's smallest strictly positive requirement of resource i over
/// the scenario set.  Contains every capacity-feasible point of every
/// scenario with a factor-two margin.
Vector default_allocation_upper(const ResourceInstance& instance, const ScenarioSet& scenarios);

/// Returns a copy of `instance` with allocation_upper filled in (derived
/// from the scenarios when unset).
ResourceInstance with_allocation_upper(const ResourceInstance& instance,
                                       const ScenarioSet& scenarios);

}  // namespace fairalloc
