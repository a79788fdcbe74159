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

namespace fairalloc {

/// Euclidean projection onto the probability simplex {p >= 0, sum p = 1}.
Vector project_simplex(const Vector& v);

/// Intersection of simple convex pieces, projected via Dykstra's
/// alternating scheme:
///   - optional probability simplex,
///   - optional box [lower, upper],
///   - halfspaces a.x <= b,
///   - slabs lo <= a.x <= hi.
/// Rows are normalized internally.  project() converges to the Euclidean
/// projection when the intersection is nonempty; when it is empty the
/// residual violation stays bounded away from zero, which callers detect
/// through max_violation().
class PolyhedralProjector {
  public:
    void set_simplex(bool on) { simplex_ = on; }
    void set_box(const Vector& lower, const Vector& upper);
    void add_halfspace(const Vector& a, double b);     // a.x <= b
    void add_slab(const Vector& a, double lo, double hi);

    Eigen::Index num_sets() const;

    /// Dykstra iteration from x0; stops when every constraint is satisfied
    /// within tol (absolute, on normalized rows) or after max_cycles.
    Vector project(const Vector& x0, double tol = 1e-12, int max_cycles = 400) const;

    /// Largest constraint violation at x (normalized rows; 0 = feasible).
    double max_violation(const Vector& x) const;

  private:
    bool simplex_ = false;
    bool box_ = false;
    Vector box_lower_, box_upper_;
    struct Row {
        Vector a;  // unit norm
        double lo;
        double hi;
    };
    std::vector<Row> rows_;
};

}  // namespace fairalloc
