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

#include "fairalloc/io.hpp"

#include <json.hpp>

#include <fstream>

namespace fairalloc {

using nlohmann::json;

namespace {

json read_json(const std::string& path, const char* kind) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string(kind) + " file: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(std::string(kind) + " file '" + path + "': " + e.what());
    }
}

void write_json(const json& j, const std::string& path, const char* kind) {
    std::ofstream out(path);
    if (!out) throw IoError(std::string(kind) + " file: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(std::string(kind) + " file: write failed for '" + path + "'");
}

Vector vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw Error("field '" + field + "' must be an array");
    Vector v(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw Error("field '" + field + "' must hold numbers");
        v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
    }
    return v;
}

json vector_to_json(const Vector& v) {
    json j = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) j.push_back(v[k]);
    return j;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw Error("field '" + field + "' must be a non-empty array of rows");
    const std::size_t cols = j[0].size();
    Matrix m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw Error("field '" + field + "': row " + std::to_string(r) + " has ragged length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json int_matrix_to_json(const IntMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

IntMatrix int_matrix_from_json(const json& j, const std::string& field) {
    const Matrix m = matrix_from_json(j, field);
    return m.cast<int>();
}

}  // namespace

ResourceInstance load_instance(const std::string& path) {
    const json j = read_json(path, "instance");
    ResourceInstance inst;
    try {
        if (!j.contains("capacities")) throw Error("missing field 'capacities'");
        inst.capacities = vector_from_json(j["capacities"], "capacities");
        if (j.contains("allocation_upper"))
            inst.allocation_upper = vector_from_json(j["allocation_upper"], "allocation_upper");
        if (j.contains("labels")) {
            const json& labels = j["labels"];
            if (labels.contains("users"))
                inst.user_labels = labels["users"].get<std::vector<std::string>>();
            if (labels.contains("resources"))
                inst.resource_labels = labels["resources"].get<std::vector<std::string>>();
        }
        if (j.contains("num_users")) {
            inst.users = j["num_users"].get<Eigen::Index>();
        } else if (inst.has_allocation_upper()) {
            inst.users = inst.allocation_upper.size();
        } else if (!inst.user_labels.empty()) {
            inst.users = static_cast<Eigen::Index>(inst.user_labels.size());
        } else {
            throw Error("cannot infer num_users (provide num_users, allocation_upper or labels.users)");
        }
        inst.validate();
    } catch (const Error& e) {
        throw IoError("instance file '" + path + "': " + e.what());
    }
    return inst;
}

void save_instance(const ResourceInstance& instance, const std::string& path) {
    instance.validate();
    json j;
    j["num_users"] = instance.users;
    j["capacities"] = vector_to_json(instance.capacities);
    if (instance.has_allocation_upper())
        j["allocation_upper"] = vector_to_json(instance.allocation_upper);
    if (!instance.user_labels.empty() || !instance.resource_labels.empty()) {
        json labels;
        if (!instance.user_labels.empty()) labels["users"] = instance.user_labels;
        if (!instance.resource_labels.empty()) labels["resources"] = instance.resource_labels;
        j["labels"] = std::move(labels);
    }
    write_json(j, path, "instance");
}

MomentAmbiguity AmbiguitySpec::resolve(const ScenarioSet& scenarios) const {
    if (explicit_set.has_value()) return *explicit_set;
    if (delta.has_value()) {
        const SampleMoments mom = sample_moments(scenarios);
        return from_moments(mom.mean, mom.variance, *delta);
    }
    throw Error("ambiguity: neither explicit moments nor delta given");
}

AmbiguitySpec load_instance_ambiguity(const std::string& path) {
    const json j = read_json(path, "instance");
    AmbiguitySpec spec;
    if (!j.contains("ambiguity")) return spec;
    const json& a = j["ambiguity"];
    try {
        if (a.contains("delta")) {
            spec.delta = a["delta"].get<double>();
        } else {
            MomentAmbiguity set;
            set.mean_lower = matrix_from_json(a.at("mean_lower"), "ambiguity.mean_lower");
            set.mean_upper = matrix_from_json(a.at("mean_upper"), "ambiguity.mean_upper");
            set.variance_upper =
                matrix_from_json(a.at("variance_upper"), "ambiguity.variance_upper");
            set.validate();
            spec.explicit_set = std::move(set);
        }
    } catch (const json::exception& e) {
        throw Error("instance file '" + path + "': ambiguity section: " + e.what());
    }
    return spec;
}

void save_report(const SolveReport& report, const std::string& path, const FairnessParams* params,
                 const PropertyReport* properties, const BoundsReport* bounds) {
    json j;
    j["model"] = to_string(report.model);
    j["allocation"] = vector_to_json(report.allocation.x);
    j["objective"] = report.objective;
    if (report.worst_case.has_value())
        j["worst_case"] = vector_to_json(report.worst_case->p);
    else
        j["worst_case"] = nullptr;
    j["inner_value_history"] = report.inner_value_history;
    j["iterations"] = report.iterations;
    j["scenario_pattern"] = int_matrix_to_json(report.scenario_pattern);
    j["wall_time"] = report.wall_time;
    j["seed"] = report.seed;
    if (!report.warnings.empty()) j["warnings"] = report.warnings;
    if (params != nullptr) {
        json p;
        p["beta"] = params->beta;
        p["lambda"] = params->effective_lambda();
        p["coupled"] = params->lambda_mode == LambdaMode::coupled;
        p["theta"] = params->theta;
        p["epsilon"] = params->epsilon;
        j["params"] = std::move(p);
    }
    if (properties != nullptr) {
        json pr;
        json si = json::array();
        for (const auto& e : properties->sharing_incentive)
            si.push_back({{"expected_dominant_share", e.expected_dominant_share}, {"pass", e.pass}});
        pr["sharing_incentive"] = std::move(si);
        pr["sharing_incentive_pass"] = properties->sharing_incentive_pass;
        json envy = json::array();
        for (const auto& v : properties->envy)
            envy.push_back(
                {{"envious", v.envious}, {"envied", v.envied}, {"min_margin", v.min_margin}});
        pr["envy"] = std::move(envy);
        pr["pareto_spot"] = {{"trials", properties->pareto_spot.trials},
                             {"violations", properties->pareto_spot.violations},
                             {"guarantee_applies", properties->pareto_spot.guarantee_applies}};
        j["properties"] = std::move(pr);
    }
    if (bounds != nullptr) {
        j["bounds"] = {{"lower", bounds->lower},
                       {"upper", bounds->upper},
                       {"point_estimate", bounds->point_estimate},
                       {"gap_percent", bounds->gap_percent},
                       {"replicates", bounds->replicates},
                       {"replicate_values", bounds->replicate_values},
                       {"replicate_lower_values", bounds->replicate_lower_values},
                       {"z_critical", bounds->z_critical},
                       {"t_critical", bounds->t_critical}};
    }
    write_json(j, path, "report");
}

LoadedReport load_report(const std::string& path) {
    const json j = read_json(path, "report");
    LoadedReport out;
    SolveReport& r = out.report;
    try {
        r.model = model_from_string(j.at("model").get<std::string>());
        r.allocation.x = vector_from_json(j.at("allocation"), "allocation");
        r.objective = j.at("objective").get<double>();
        if (j.contains("worst_case") && !j["worst_case"].is_null()) {
            DiscreteDistribution p;
            p.p = vector_from_json(j["worst_case"], "worst_case");
            r.worst_case = std::move(p);
        }
        if (j.contains("inner_value_history"))
            r.inner_value_history = j["inner_value_history"].get<std::vector<double>>();
        r.iterations = j.value("iterations", 0);
        if (j.contains("scenario_pattern") && !j["scenario_pattern"].empty())
            r.scenario_pattern = int_matrix_from_json(j["scenario_pattern"], "scenario_pattern");
        r.wall_time = j.value("wall_time", 0.0);
        r.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
        if (j.contains("params")) {
            FairnessParams p;
            p.beta = j["params"].at("beta").get<double>();
            p.theta = j["params"].value("theta", 1.0);
            p.epsilon = j["params"].value("epsilon", 1e-6);
            if (j["params"].value("coupled", false)) {
                p.lambda_mode = LambdaMode::coupled;
            } else {
                p.lambda = j["params"].at("lambda").get<double>();
            }
            out.params = p;
        }
        r.validate();
    } catch (const json::exception& e) {
        throw IoError("report file '" + path + "': " + e.what());
    } catch (const Error& e) {
        throw IoError("report file '" + path + "': " + e.what());
    }
    return out;
}

GeneratorSpec load_generator_spec(const std::string& path) {
    const json j = read_json(path, "generator spec");
    GeneratorSpec spec;
    try {
        spec.family = family_from_string(j.at("family").get<std::string>());
        spec.count = j.value("count", Eigen::Index{1});
        spec.seed = j.value("seed", std::uint64_t{0});
        switch (spec.family) {
            case ScenarioFamily::uniform:
                spec.lower = matrix_from_json(j.at("lower"), "lower");
                spec.upper = matrix_from_json(j.at("upper"), "upper");
                break;
            case ScenarioFamily::triangular:
                spec.lower = matrix_from_json(j.at("lower"), "lower");
                spec.upper = matrix_from_json(j.at("upper"), "upper");
                spec.mode = matrix_from_json(j.at("mode"), "mode");
                break;
            case ScenarioFamily::two_point:
                spec.branch_a = matrix_from_json(j.at("branch_a"), "branch_a");
                spec.branch_b = matrix_from_json(j.at("branch_b"), "branch_b");
                spec.prob = j.value("prob", 0.5);
                break;
            case ScenarioFamily::box:
                spec.nominal = matrix_from_json(j.at("nominal"), "nominal");
                spec.radius = j.at("radius").get<double>();
                break;
        }
        spec.validate();
    } catch (const json::exception& e) {
        throw IoError("generator spec '" + path + "': " + e.what());
    } catch (const Error& e) {
        throw IoError("generator spec '" + path + "': " + e.what());
    }
    return spec;
}

void save_generator_spec(const GeneratorSpec& spec, const std::string& path) {
    spec.validate();
    json j;
    j["family"] = to_string(spec.family);
    j["count"] = spec.count;
    j["seed"] = spec.seed;
    switch (spec.family) {
        case ScenarioFamily::uniform:
            j["lower"] = matrix_to_json(spec.lower);
            j["upper"] = matrix_to_json(spec.upper);
            break;
        case ScenarioFamily::triangular:
            j["lower"] = matrix_to_json(spec.lower);
            j["upper"] = matrix_to_json(spec.upper);
            j["mode"] = matrix_to_json(spec.mode);
            break;
        case ScenarioFamily::two_point:
            j["branch_a"] = matrix_to_json(spec.branch_a);
            j["branch_b"] = matrix_to_json(spec.branch_b);
            j["prob"] = spec.prob;
            break;
        case ScenarioFamily::box:
            j["nominal"] = matrix_to_json(spec.nominal);
            j["radius"] = spec.radius;
            break;
    }
    write_json(j, path, "generator spec");
}

void save_bounds_report(const BoundsReport& report, const std::string& path) {
    json j = {{"lower", report.lower},
              {"upper", report.upper},
              {"point_estimate", report.point_estimate},
              {"gap_percent", report.gap_percent},
              {"replicates", report.replicates},
              {"replicate_values", report.replicate_values},
              {"replicate_lower_values", report.replicate_lower_values},
              {"z_critical", report.z_critical},
              {"t_critical", report.t_critical}};
    write_json(j, path, "bounds report");
}

}  // namespace fairalloc
