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

#include "fairalloc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fairalloc {

namespace {

// 53-bit uniform in [0, 1); portable for a fixed mt19937_64 seed.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double triangular_draw(double a, double c, double b, double u) {
    if (b <= a) return a;
    const double fc = (c - a) / (b - a);
    if (u < fc) return a + std::sqrt(u * (b - a) * (c - a));
    return b - std::sqrt((1.0 - u) * (b - a) * (b - c));
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "generator: parameter '" << name << "' has shape " << m.rows() << "x" << m.cols()
           << ", expected " << rows << "x" << cols;
        throw Error(os.str());
    }
}

}  // namespace

std::string to_string(ScenarioFamily family) {
    switch (family) {
        case ScenarioFamily::uniform: return "uniform";
        case ScenarioFamily::triangular: return "triangular";
        case ScenarioFamily::two_point: return "two_point";
        case ScenarioFamily::box: return "box";
    }
    return "unknown";
}

ScenarioFamily family_from_string(const std::string& name) {
    if (name == "uniform") return ScenarioFamily::uniform;
    if (name == "triangular") return ScenarioFamily::triangular;
    if (name == "two_point") return ScenarioFamily::two_point;
    if (name == "box") return ScenarioFamily::box;
    throw Error("unknown scenario family '" + name + "'");
}

Eigen::Index GeneratorSpec::num_resources() const {
    switch (family) {
        case ScenarioFamily::uniform:
        case ScenarioFamily::triangular: return lower.rows();
        case ScenarioFamily::two_point: return branch_a.rows();
        case ScenarioFamily::box: return nominal.rows();
    }
    return 0;
}

Eigen::Index GeneratorSpec::num_users() const {
    switch (family) {
        case ScenarioFamily::uniform:
        case ScenarioFamily::triangular: return lower.cols();
        case ScenarioFamily::two_point: return branch_a.cols();
        case ScenarioFamily::box: return nominal.cols();
    }
    return 0;
}

void GeneratorSpec::validate() const {
    if (count < 1) throw Error("generator: count must be >= 1, got " + std::to_string(count));
    const Eigen::Index m = num_resources();
    const Eigen::Index d = num_users();
    if (m < 1 || d < 1) throw Error("generator: parameter matrices must be at least 1x1");
    switch (family) {
        case ScenarioFamily::uniform:
            require_shape(upper, m, d, "upper");
            if ((upper.array() < lower.array()).any())
                throw Error("generator: uniform requires lower <= upper elementwise");
            break;
        case ScenarioFamily::triangular:
            require_shape(upper, m, d, "upper");
            require_shape(mode, m, d, "mode");
            if ((upper.array() < lower.array()).any())
                throw Error("generator: triangular requires lower <= upper elementwise");
            if ((mode.array() < lower.array()).any() || (mode.array() > upper.array()).any())
                throw Error("generator: triangular requires lower <= mode <= upper elementwise");
            break;
        case ScenarioFamily::two_point:
            require_shape(branch_b, m, d, "branch_b");
            if (!(prob >= 0.0 && prob <= 1.0))
                throw Error("generator: two_point probability must lie in [0,1]");
            break;
        case ScenarioFamily::box:
            if (radius < 0.0) throw Error("generator: box radius must be >= 0");
            break;
    }
}

ScenarioSet generate(const GeneratorSpec& spec) {
    spec.validate();
    const Eigen::Index m = spec.num_resources();
    const Eigen::Index d = spec.num_users();

    std::mt19937_64 rng(spec.seed);
    auto draw_one = [&]() -> Matrix {
        Matrix r(m, d);
        switch (spec.family) {
            case ScenarioFamily::uniform:
                for (Eigen::Index i = 0; i < m; ++i)
                    for (Eigen::Index j = 0; j < d; ++j)
                        r(i, j) = spec.lower(i, j) +
                                  canonical(rng) * (spec.upper(i, j) - spec.lower(i, j));
                break;
            case ScenarioFamily::triangular:
                for (Eigen::Index i = 0; i < m; ++i)
                    for (Eigen::Index j = 0; j < d; ++j)
                        r(i, j) = triangular_draw(spec.lower(i, j), spec.mode(i, j),
                                                  spec.upper(i, j), canonical(rng));
                break;
            case ScenarioFamily::two_point:
                r = canonical(rng) < spec.prob ? spec.branch_a : spec.branch_b;
                break;
            case ScenarioFamily::box:
                for (Eigen::Index i = 0; i < m; ++i)
                    for (Eigen::Index j = 0; j < d; ++j)
                        r(i, j) = spec.nominal(i, j) + spec.radius * (2.0 * canonical(rng) - 1.0);
                break;
        }
        return r.cwiseMax(0.0);
    };

    ScenarioSet out;
    out.scenarios.reserve(static_cast<std::size_t>(spec.count));
    const long budget = 100 * static_cast<long>(spec.count);
    long draws = 0;
    while (static_cast<Eigen::Index>(out.scenarios.size()) < spec.count) {
        if (draws >= budget) {
            std::ostringstream os;
            os << "generator: could not produce " << spec.count << " distinct scenarios in "
               << budget << " draws (degenerate support)";
            throw Error(os.str());
        }
        Matrix r = draw_one();
        ++draws;
        const bool dup = std::any_of(out.scenarios.begin(), out.scenarios.end(),
                                     [&](const Matrix& s) { return dense_equal(s, r); });
        if (!dup) out.scenarios.push_back(std::move(r));
    }
    out.validate();
    return out;
}

TraceData ingest_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("trace: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("trace '" + path + "': empty file");

    // header: scenario_id,user,resource,requirement
    {
        std::string h = line;
        h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\r'; }),
                h.end());
        if (h != "scenario_id,user,resource,requirement")
            throw IoError("trace '" + path + "': bad header '" + line +
                        "' (expected scenario_id,user,resource,requirement)");
    }

    struct Cell {
        long user;
        long resource;
        double value;
    };
    std::map<long, std::vector<Cell>> by_scenario;
    long max_user = 0, max_resource = 0;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        long sid, user, resource;
        double value;
        if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf", &sid, &user, &resource, &value) != 4) {
            throw IoError("trace '" + path + "' line " + std::to_string(line_no) +
                        ": expected scenario_id,user,resource,requirement");
        }
        if (user < 1 || resource < 1)
            throw IoError("trace '" + path + "' line " + std::to_string(line_no) +
                        ": user and resource indices are 1-based");
        if (value < 0.0)
            throw IoError("trace '" + path + "' line " + std::to_string(line_no) +
                        ": negative requirement " + std::to_string(value));
        by_scenario[sid].push_back({user, resource, value});
        max_user = std::max(max_user, user);
        max_resource = std::max(max_resource, resource);
    }
    if (by_scenario.empty()) throw IoError("trace '" + path + "': no data rows");

    const Eigen::Index d = max_user;
    const Eigen::Index m = max_resource;
    TraceData out;
    for (const auto& [sid, cells] : by_scenario) {
        Matrix r = Matrix::Constant(m, d, -1.0);
        for (const Cell& c : cells) {
            if (r(c.resource - 1, c.user - 1) >= 0.0) {
                std::ostringstream os;
                os << "trace '" << path << "': duplicate cell (scenario " << sid << ", user "
                   << c.user << ", resource " << c.resource << ")";
                throw Error(os.str());
            }
            r(c.resource - 1, c.user - 1) = c.value;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                if (r(i, j) < 0.0) {
                    std::ostringstream os;
                    os << "trace '" << path << "': missing cell (scenario " << sid << ", user "
                       << j + 1 << ", resource " << i + 1 << ")";
                    throw Error(os.str());
                }
            }
        }
        out.scenarios.scenarios.push_back(std::move(r));
    }
    out.scenarios.validate();
    out.baseline = sample_moments(out.scenarios).mean;
    return out;
}

void save_scenarios(const ScenarioSet& scenarios, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw IoError("trace: cannot write '" + path + "'");
    outf << "scenario_id,user,resource,requirement\n";
    char buf[64];
    for (std::size_t w = 0; w < scenarios.scenarios.size(); ++w) {
        const Matrix& r = scenarios.scenarios[w];
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            for (Eigen::Index i = 0; i < r.rows(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", r(i, j));
                outf << (w + 1) << ',' << (j + 1) << ',' << (i + 1) << ',' << buf << '\n';
            }
        }
    }
    if (!outf) throw IoError("trace: write failed for '" + path + "'");
}

SampleMoments sample_moments(const ScenarioSet& scenarios, const DiscreteDistribution* weights) {
    scenarios.validate();
    const Eigen::Index n = scenarios.size();
    Vector w;
    if (weights != nullptr) {
        weights->validate();
        if (weights->p.size() != n)
            throw Error("sample_moments: weights length does not match scenario count");
        w = weights->p;
    } else {
        w = Vector::Constant(n, 1.0 / static_cast<double>(n));
    }
    const Eigen::Index m = scenarios.num_resources();
    const Eigen::Index d = scenarios.num_users();
    SampleMoments out;
    out.mean = Matrix::Zero(m, d);
    Matrix second = Matrix::Zero(m, d);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.mean += w[k] * scenarios.scenarios[static_cast<std::size_t>(k)];
        second += w[k] * scenarios.scenarios[static_cast<std::size_t>(k)].array().square().matrix();
    }
    out.variance = (second.array() - out.mean.array().square()).cwiseMax(0.0);
    return out;
}

std::array<GeneratorSpec, 3> demo_variance_configs(double prob, std::uint64_t seed) {
    // User 1 requires (1, 4) in both branches; user 2's (c, d) pairs below
    // share the prob = 0.5 mean (3.0, 1.0).
    const std::array<std::array<double, 4>, 3> cd = {{
        {0.5, 0.5, 5.5, 1.5},
        {1.5, 0.5, 4.5, 1.5},
        {2.5, 0.5, 3.5, 1.5},
    }};
    std::array<GeneratorSpec, 3> specs;
    for (std::size_t k = 0; k < 3; ++k) {
        GeneratorSpec s;
        s.family = ScenarioFamily::two_point;
        s.count = 2;
        s.seed = seed;
        s.prob = prob;
        s.branch_a = Matrix(2, 2);
        s.branch_a << 1.0, cd[k][0], 4.0, cd[k][1];
        s.branch_b = Matrix(2, 2);
        s.branch_b << 1.0, cd[k][2], 4.0, cd[k][3];
        specs[k] = std::move(s);
    }
    return specs;
}

}  // namespace fairalloc
