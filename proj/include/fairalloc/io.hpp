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

#include "fairalloc/ambiguity.hpp"
#include "fairalloc/analysis.hpp"
#include "fairalloc/scenarios.hpp"
#include "fairalloc/types.hpp"

namespace fairalloc {

/// Instance file: {"num_users": d, "capacities": [...],
/// "allocation_upper": [...] (optional), "labels": {"users": [...],
/// "resources": [...]} (optional), "ambiguity": {"delta": x} or
/// {"mean_lower": [[..]], "mean_upper": [[..]], "variance_upper": [[..]]}
/// (optional)}.  num_users may be omitted when allocation_upper or
/// labels.users pins it.
ResourceInstance load_instance(const std::string& path);
void save_instance(const ResourceInstance& instance, const std::string& path);

/// Ambiguity description carried inside an instance file: either explicit
/// moment matrices or a delta referencing sample moments of a scenario set.
struct AmbiguitySpec {
    std::optional<MomentAmbiguity> explicit_set;
    std::optional<double> delta;

    bool empty() const { return !explicit_set.has_value() && !delta.has_value(); }
    MomentAmbiguity resolve(const ScenarioSet& scenarios) const;
};

AmbiguitySpec load_instance_ambiguity(const std::string& path);

/// Report files mirror SolveReport; numeric fields survive a save/load
/// round trip bit-exactly.  Optional property and bounds sections are
/// written when provided.
void save_report(const SolveReport& report, const std::string& path,
                 const FairnessParams* params = nullptr, const PropertyReport* properties = nullptr,
                 const BoundsReport* bounds = nullptr);

struct LoadedReport {
    SolveReport report;
    std::optional<FairnessParams> params;
};

LoadedReport load_report(const std::string& path);

/// Generator spec files: {"family": "...", "count": n, "seed": s, ...}
/// with per-family matrix parameters as row-major nested arrays.
GeneratorSpec load_generator_spec(const std::string& path);
void save_generator_spec(const GeneratorSpec& spec, const std::string& path);

void save_bounds_report(const BoundsReport& report, const std::string& path);

}  // namespace fairalloc
