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

#include "fairalloc/shares.hpp"

#include <limits>

namespace fairalloc {

Matrix mu_table(const ResourceInstance& instance, const ScenarioSet& scenarios) {
    const Eigen::Index n = scenarios.size();
    Matrix table(n, instance.num_users());
    for (Eigen::Index w = 0; w < n; ++w) {
        table.row(w) = derive_shares(instance, scenarios.scenarios[w]).mu.transpose();
    }
    return table;
}

Vector default_allocation_upper(const ResourceInstance& instance, const ScenarioSet& scenarios) {
    const Eigen::Index m = instance.num_resources();
    const Eigen::Index d = instance.num_users();
    detail::check_scenario_dims(scenarios.num_resources(), scenarios.num_users(), instance);

    Vector upper(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double bound = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            double rmin = std::numeric_limits<double>::infinity();
            for (const Matrix& r : scenarios.scenarios) {
                const double v = r(i, j);
                if (v > 0.0 && v < rmin) rmin = v;
            }
            if (std::isfinite(rmin)) bound = std::min(bound, instance.capacities[i] / rmin);
        }
        if (!std::isfinite(bound)) {
            std::ostringstream os;
            os << "default_allocation_upper: user " << j
               << " has no positive requirement in any scenario";
            throw Error(os.str());
        }
        upper[j] = 2.0 * bound;
    }
    return upper;
}

ResourceInstance with_allocation_upper(const ResourceInstance& instance,
                                       const ScenarioSet& scenarios) {
    ResourceInstance out = instance;
    if (!out.has_allocation_upper()) out.allocation_upper = default_allocation_upper(instance, scenarios);
    out.validate();
    return out;
}

}  // namespace fairalloc
