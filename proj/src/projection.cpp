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

#include "fairalloc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairalloc {

Vector project_simplex(const Vector& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssv = 0.0;
    double tau = 0.0;
    int rho = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cssv += u[static_cast<std::size_t>(k)];
        const double t = (cssv - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - t > 0.0) {
            tau = t;
            rho = static_cast<int>(k) + 1;
        }
    }
    (void)rho;
    return (v.array() - tau).cwiseMax(0.0);
}

void PolyhedralProjector::set_box(const Vector& lower, const Vector& upper) {
    box_ = true;
    box_lower_ = lower;
    box_upper_ = upper;
}

void PolyhedralProjector::add_halfspace(const Vector& a, double b) {
    const double n = a.norm();
    if (n <= 0.0) return;  // vacuous row
    rows_.push_back({a / n, -std::numeric_limits<double>::infinity(), b / n});
}

void PolyhedralProjector::add_slab(const Vector& a, double lo, double hi) {
    const double n = a.norm();
    if (n <= 0.0) return;
    rows_.push_back({a / n, lo / n, hi / n});
}

Eigen::Index PolyhedralProjector::num_sets() const {
    return static_cast<Eigen::Index>(rows_.size()) + (simplex_ ? 1 : 0) + (box_ ? 1 : 0);
}

double PolyhedralProjector::max_violation(const Vector& x) const {
    double v = 0.0;
    if (simplex_) {
        v = std::max(v, std::abs(x.sum() - 1.0));
        v = std::max(v, -x.minCoeff());
    }
    if (box_) {
        v = std::max(v, (box_lower_ - x).maxCoeff());
        v = std::max(v, (x - box_upper_).maxCoeff());
    }
    for (const Row& r : rows_) {
        const double dot = r.a.dot(x);
        if (std::isfinite(r.lo)) v = std::max(v, r.lo - dot);
        v = std::max(v, dot - r.hi);
    }
    return std::max(v, 0.0);
}

Vector PolyhedralProjector::project(const Vector& x0, double tol, int max_cycles) const {
    Vector x = x0;
    const std::size_t nsets = rows_.size() + (simplex_ ? 1u : 0u) + (box_ ? 1u : 0u);
    if (nsets == 0) return x;

    // Dykstra corrections, one per set; the plain POCS sweep (no memory)
    // would not return the Euclidean projection.
    std::vector<Vector> corr(nsets, Vector::Zero(x.size()));

    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        std::size_t s = 0;
        if (simplex_) {
            const Vector y = x + corr[s];
            const Vector px = project_simplex(y);
            corr[s] = y - px;
            x = px;
            ++s;
        }
        if (box_) {
            const Vector y = x + corr[s];
            const Vector px = y.cwiseMax(box_lower_).cwiseMin(box_upper_);
            corr[s] = y - px;
            x = px;
            ++s;
        }
        for (const Row& r : rows_) {
            const Vector y = x + corr[s];
            Vector px = y;
            const double dot = r.a.dot(y);
            if (dot > r.hi) {
                px = y - (dot - r.hi) * r.a;
            } else if (std::isfinite(r.lo) && dot < r.lo) {
                px = y + (r.lo - dot) * r.a;
            }
            corr[s] = y - px;
            x = px;
            ++s;
        }
        if (max_violation(x) <= tol) break;
    }
    return x;
}

}  // namespace fairalloc
