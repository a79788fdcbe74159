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

#include "fairalloc/types.hpp"

#include <sstream>

namespace fairalloc {

void ResourceInstance::validate() const {
    if (users < 1) throw Error("instance: num_users must be >= 1, got " + std::to_string(users));
    if (capacities.size() < 1) throw Error("instance: capacities must be non-empty");
    for (Eigen::Index i = 0; i < capacities.size(); ++i) {
        if (!(capacities[i] > 0.0) || !std::isfinite(capacities[i])) {
            std::ostringstream os;
            os << "instance: capacities[" << i << "] must be positive and finite, got " << capacities[i];
            throw Error(os.str());
        }
    }
    if (has_allocation_upper()) {
        if (allocation_upper.size() != users) {
            throw Error("instance: allocation_upper length " + std::to_string(allocation_upper.size()) +
                        " does not match num_users " + std::to_string(users));
        }
        for (Eigen::Index j = 0; j < allocation_upper.size(); ++j) {
            if (!(allocation_upper[j] > 0.0) || !std::isfinite(allocation_upper[j])) {
                std::ostringstream os;
                os << "instance: allocation_upper[" << j << "] must be positive and finite, got "
                   << allocation_upper[j];
                throw Error(os.str());
            }
        }
    }
    if (!user_labels.empty() && static_cast<Eigen::Index>(user_labels.size()) != users)
        throw Error("instance: labels.users length does not match num_users");
    if (!resource_labels.empty() &&
        static_cast<Eigen::Index>(resource_labels.size()) != capacities.size())
        throw Error("instance: labels.resources length does not match capacities");
}

void ScenarioSet::validate() const {
    if (scenarios.empty()) throw Error("scenarios: set must contain at least one scenario");
    const Eigen::Index m = scenarios.front().rows();
    const Eigen::Index d = scenarios.front().cols();
    if (m < 1 || d < 1) throw Error("scenarios: matrices must be at least 1x1");
    for (std::size_t w = 0; w < scenarios.size(); ++w) {
        const Matrix& r = scenarios[w];
        if (r.rows() != m || r.cols() != d) {
            std::ostringstream os;
            os << "scenarios: scenario " << w << " has shape " << r.rows() << "x" << r.cols()
               << ", expected " << m << "x" << d;
            throw Error(os.str());
        }
        if ((r.array() < 0.0).any() || !r.allFinite()) {
            std::ostringstream os;
            os << "scenarios: scenario " << w << " has a negative or non-finite requirement";
            throw Error(os.str());
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            if (r.col(j).maxCoeff() <= 0.0) {
                std::ostringstream os;
                os << "scenarios: scenario " << w << " user " << j
                   << " has all-zero requirements (dominant share undefined)";
                throw Error(os.str());
            }
        }
    }
    for (std::size_t a = 0; a < scenarios.size(); ++a) {
        for (std::size_t b = a + 1; b < scenarios.size(); ++b) {
            if (dense_equal(scenarios[a], scenarios[b])) {
                std::ostringstream os;
                os << "scenarios: scenarios " << a << " and " << b << " are identical";
                throw Error(os.str());
            }
        }
    }
}

void Allocation::validate(const ResourceInstance& instance) const {
    if (x.size() != instance.num_users())
        throw Error("allocation: length " + std::to_string(x.size()) + " does not match num_users " +
                    std::to_string(instance.num_users()));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(x[j] >= 0.0) || !std::isfinite(x[j])) {
            std::ostringstream os;
            os << "allocation: x[" << j << "] must be finite and >= 0, got " << x[j];
            throw Error(os.str());
        }
        if (instance.has_allocation_upper() && x[j] > instance.allocation_upper[j] * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "allocation: x[" << j << "]=" << x[j] << " exceeds upper bound "
               << instance.allocation_upper[j];
            throw Error(os.str());
        }
    }
}

void DiscreteDistribution::validate() const {
    if (p.size() < 1) throw Error("distribution: empty probability vector");
    for (Eigen::Index w = 0; w < p.size(); ++w) {
        if (!(p[w] >= 0.0) || !std::isfinite(p[w])) {
            std::ostringstream os;
            os << "distribution: p[" << w << "] must be finite and >= 0, got " << p[w];
            throw Error(os.str());
        }
    }
    const double s = p.sum();
    if (std::abs(s - 1.0) > kDistributionSumTol) {
        std::ostringstream os;
        os << "distribution: probabilities sum to " << s << ", expected 1 within " << kDistributionSumTol;
        throw Error(os.str());
    }
}

DiscreteDistribution DiscreteDistribution::uniform(Eigen::Index n) {
    DiscreteDistribution d;
    d.p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    return d;
}

DiscreteDistribution DiscreteDistribution::point_mass(Eigen::Index n, Eigen::Index at) {
    DiscreteDistribution d;
    d.p = Vector::Zero(n);
    d.p[at] = 1.0;
    return d;
}

void FairnessParams::validate() const {
    if (!(epsilon > 0.0)) throw Error("params: epsilon must be > 0, got " + std::to_string(epsilon));
    if (!(theta >= 0.0 && theta <= 1.0))
        throw Error("params: theta must lie in [0,1], got " + std::to_string(theta));
    if (lambda_mode == LambdaMode::coupled && beta == 1.0)
        throw Error("params: coupled lambda requires beta != 1");
    if (!std::isfinite(beta) || !std::isfinite(effective_lambda()))
        throw Error("params: beta and lambda must be finite");
}

std::string to_string(Model model) {
    switch (model) {
        case Model::fds: return "fds";
        case Model::ev: return "ev";
        case Model::robust: return "robust";
        case Model::saa: return "saa";
        case Model::sadr: return "sadr";
    }
    return "unknown";
}

Model model_from_string(const std::string& name) {
    if (name == "fds") return Model::fds;
    if (name == "ev") return Model::ev;
    if (name == "robust") return Model::robust;
    if (name == "saa") return Model::saa;
    if (name == "sadr") return Model::sadr;
    throw Error("unknown model '" + name + "' (expected fds|ev|robust|saa|sadr)");
}

void SolveReport::validate() const {
    if (!std::isfinite(objective)) throw Error("report: objective must be finite");
    if (model == Model::sadr) {
        if (!worst_case.has_value()) throw Error("report: sadr report requires worst_case distribution");
        if (iterations < 1) throw Error("report: sadr report requires iterations >= 1");
    }
}

}  // namespace fairalloc
