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

#include "fairalloc/ambiguity.hpp"

#include <sstream>

namespace fairalloc {

void MomentAmbiguity::validate() const {
    const Eigen::Index m = mean_lower.rows();
    const Eigen::Index d = mean_lower.cols();
    if (m < 1 || d < 1) throw Error("ambiguity: empty moment matrices");
    if (mean_upper.rows() != m || mean_upper.cols() != d || variance_upper.rows() != m ||
        variance_upper.cols() != d)
        throw Error("ambiguity: moment matrices must share one shape");
    if ((mean_upper.array() < mean_lower.array()).any())
        throw Error("ambiguity: mean_lower must not exceed mean_upper");
    if ((variance_upper.array() < 0.0).any())
        throw Error("ambiguity: variance_upper must be non-negative");
}

MomentAmbiguity from_moments(const Matrix& mean, const Matrix& variance, double delta) {
    if (delta < 0.0) throw Error("ambiguity: delta must be >= 0, got " + std::to_string(delta));
    if (mean.rows() != variance.rows() || mean.cols() != variance.cols())
        throw Error("ambiguity: mean and variance shapes differ");
    if ((mean.array() < 0.0).any() || (variance.array() < 0.0).any())
        throw Error("ambiguity: moments must be non-negative");
    MomentAmbiguity set;
    set.mean_lower = ((1.0 - delta) * mean).cwiseMax(0.0);
    set.mean_upper = (1.0 + delta) * mean;
    set.variance_upper = (1.0 + delta) * variance;
    set.validate();
    return set;
}

MembershipSlacks membership_slacks(const DiscreteDistribution& p, const ScenarioSet& scenarios,
                                   const MomentAmbiguity& set) {
    p.validate();
    set.validate();
    if (p.p.size() != scenarios.size())
        throw Error("membership_slacks: distribution length does not match scenario count");
    if (set.num_resources() != scenarios.num_resources() ||
        set.num_users() != scenarios.num_users())
        throw Error("membership_slacks: ambiguity set shape does not match scenarios");

    const SampleMoments mom = sample_moments(scenarios, &p);
    MembershipSlacks s;
    s.mean_lower = mom.mean - set.mean_lower;
    s.mean_upper = set.mean_upper - mom.mean;
    s.variance = set.variance_upper - mom.variance;
    return s;
}

double MembershipSlacks::min_slack() const {
    return std::min({mean_lower.minCoeff(), mean_upper.minCoeff(), variance.minCoeff()});
}

bool is_vacuous(const MomentAmbiguity& set, const ScenarioSet& scenarios) {
    set.validate();
    scenarios.validate();
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index d = scenarios.num_users();
    if (set.num_resources() != m || set.num_users() != d)
        throw Error("is_vacuous: ambiguity set shape does not match scenarios");

    const double tol = 1e-12;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double lo = scenarios.scenarios.front()(i, j);
            double hi = lo;
            for (const Matrix& r : scenarios.scenarios) {
                lo = std::min(lo, r(i, j));
                hi = std::max(hi, r(i, j));
            }
            // every vertex inside the mean interval
            if (lo < set.mean_lower(i, j) - tol || hi > set.mean_upper(i, j) + tol) return false;
            // largest variance any distribution on [lo, hi] values can reach
            const double max_var = (hi - lo) * (hi - lo) / 4.0;
            if (set.variance_upper(i, j) < max_var - tol) return false;
        }
    }
    return true;
}

MomentAmbiguity vacuous_for(const ScenarioSet& scenarios) {
    scenarios.validate();
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index d = scenarios.num_users();
    MomentAmbiguity set;
    set.mean_lower = Matrix::Zero(m, d);
    set.mean_upper = Matrix::Zero(m, d);
    set.variance_upper = Matrix::Zero(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double lo = scenarios.scenarios.front()(i, j);
            double hi = lo;
            for (const Matrix& r : scenarios.scenarios) {
                lo = std::min(lo, r(i, j));
                hi = std::max(hi, r(i, j));
            }
            set.mean_lower(i, j) = lo;
            set.mean_upper(i, j) = hi;
            set.variance_upper(i, j) = (hi - lo) * (hi - lo) / 4.0 * (1.0 + 1e-9) + 1e-15;
        }
    }
    set.validate();
    return set;
}

}  // namespace fairalloc
