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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fairalloc/baselines.hpp"
#include "fairalloc/scenarios.hpp"
#include "support/test_support.hpp"

using namespace fairalloc;
namespace ft = fairalloc::testing;

namespace {

ScenarioSet demo_pair(int config = 0) {
    const auto specs = demo_variance_configs(0.5, 1);
    return generate(specs[static_cast<std::size_t>(config)]);
}

}  // namespace

TEST_CASE("single scenario: all four models coincide") {
    ResourceInstance inst = ft::toy_instance();
    Matrix r(2, 2);
    r << 1.0, 3.0, 4.0, 1.0;
    ScenarioSet s;
    s.scenarios = {r};
    const FairnessParams params = FairnessParams::coupled(2.0, 1.0, 1e-8);

    const SolveReport fds = solve_fds(inst, r, params, 7);
    const SolveReport ev = solve_ev(inst, s, DiscreteDistribution::uniform(1), params, 7);
    const SolveReport rob = solve_robust(inst, s, params, 7);
    const SolveReport saa = solve_saa(inst, s, params, 7);

    CHECK(ev.objective == doctest::Approx(fds.objective).epsilon(1e-8));
    CHECK(rob.objective == doctest::Approx(fds.objective).epsilon(1e-8));
    CHECK(saa.objective == doctest::Approx(fds.objective).epsilon(1e-8));
}

TEST_CASE("one-dimensional deterministic solve hits the capacity bound") {
    ResourceInstance inst;
    inst.users = 1;
    inst.capacities = Vector::Constant(1, 8.0);
    Matrix r(1, 1);
    r << 2.0;
    const SolveReport rep = solve_fds(inst, r, FairnessParams::coupled(2.0), 3);
    CHECK(rep.allocation.x[0] == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("symmetric users get equal allocations") {
    ResourceInstance inst;
    inst.users = 2;
    inst.capacities = Vector(2);
    inst.capacities << 6.0, 6.0;
    Matrix r(2, 2);
    r << 1.0, 1.0, 2.0, 2.0;
    const SolveReport rep = solve_fds(inst, r, FairnessParams::coupled(2.0), 5);
    CHECK(rep.allocation.x[0] == doctest::Approx(rep.allocation.x[1]).epsilon(1e-6));
}

TEST_CASE("large beta approaches equalized dominant shares") {
    // analytic max-min point: mu1 x1 = mu2 x2 on the binding resource,
    // x2 = (2/3) x1 and x1 + 3 x2 = 9 give x = (3, 2); the share gap at
    // finite beta shrinks like 1/beta (1.38% at beta = 50 on this matrix)
    ResourceInstance inst = ft::toy_instance();
    Matrix r(2, 2);
    r << 1.0, 3.0, 4.0, 1.0;  // mu = (2/9, 1/3)
    const SolveReport rep = solve_fds(inst, r, FairnessParams::coupled(100.0), 9);
    const double s1 = (2.0 / 9.0) * rep.allocation.x[0];
    const double s2 = (1.0 / 3.0) * rep.allocation.x[1];
    CHECK(std::abs(s1 - s2) <= 0.01 * std::max(s1, s2));
    CHECK(rep.allocation.x[0] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(rep.allocation.x[1] == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("expected-value model ignores mean-preserving scenario changes at theta 0") {
    const ResourceInstance inst = ft::toy_instance();
    const FairnessParams params = FairnessParams::coupled(2.0, 0.0, 1e-7);
    std::vector<double> values;
    for (int config = 0; config < 3; ++config) {
        const ScenarioSet s = demo_pair(config);
        values.push_back(
            solve_ev(inst, s, DiscreteDistribution::uniform(2), params, 11).objective);
    }
    CHECK(std::abs(values[0] - values[1]) <= 1e-6 * std::abs(values[0]));
    CHECK(std::abs(values[0] - values[2]) <= 1e-6 * std::abs(values[0]));
}

TEST_CASE("expected-value model at one scenario reduces to the deterministic solve") {
    ResourceInstance inst = ft::toy_instance();
    Matrix r(2, 2);
    r << 1.0, 2.0, 4.0, 0.5;
    ScenarioSet s;
    s.scenarios = {r};
    const FairnessParams params = FairnessParams::coupled(2.0, 0.95, 1e-7);
    const SolveReport ev = solve_ev(inst, s, DiscreteDistribution::uniform(1), params, 13);
    const SolveReport fds = solve_fds(inst, r, params, 13);
    CHECK(ev.objective == doctest::Approx(fds.objective).epsilon(1e-8));
}

TEST_CASE("theta sweep of the expected-value model is nonincreasing") {
    const ResourceInstance inst = ft::toy_instance();
    const ScenarioSet s = demo_pair(0);
    const DiscreteDistribution truth = DiscreteDistribution::uniform(2);
    double prev = std::numeric_limits<double>::infinity();
    for (double theta : {0.3, 0.6, 0.9, 1.0}) {
        FairnessParams params = FairnessParams::coupled(2.0, theta, 1e-7);
        const double v = solve_ev(inst, s, truth, params, 17).objective;
        CHECK(v <= prev + 1e-6);
        prev = v;
    }
}

TEST_CASE("robust model matches the single-scenario solve and shrinks with rho") {
    ResourceInstance inst = ft::toy_instance();
    Matrix nominal(2, 2);
    nominal << 1.0, 2.0, 4.0, 1.0;

    SUBCASE("single scenario") {
        ScenarioSet s;
        s.scenarios = {nominal};
        const FairnessParams params = FairnessParams::coupled(2.0, 1.0, 1e-7);
        CHECK(solve_robust(inst, s, params, 19).objective ==
              doctest::Approx(solve_fds(inst, nominal, params, 19).objective).epsilon(1e-8));
    }

    SUBCASE("objective nonincreasing in the box radius") {
        const FairnessParams params = FairnessParams::coupled(2.0, 1.0, 1e-7);
        double prev = std::numeric_limits<double>::infinity();
        for (double rho : {0.1, 0.3, 0.6, 0.9}) {
            GeneratorSpec spec;
            spec.family = ScenarioFamily::box;
            spec.count = 12;
            spec.seed = 23;
            spec.nominal = nominal;
            spec.radius = rho;
            const ScenarioSet s = generate(spec);
            const double v = solve_robust(inst, s, params, 23).objective;
            CHECK(v <= prev + 1e-6);
            prev = v;
        }
    }
}

TEST_CASE("sample-average model prefers the low-variance configuration") {
    const ResourceInstance inst = ft::toy_instance();
    const FairnessParams params = FairnessParams::coupled(2.0, 0.95, 1e-7);
    const double high_var = solve_saa(inst, demo_pair(0), params, 29).objective;
    const double low_var = solve_saa(inst, demo_pair(2), params, 29).objective;
    CHECK(low_var > high_var + 1e-6);
}

TEST_CASE("triangular scenarios score at least as well as uniform ones") {
    const ResourceInstance inst = ft::toy_instance();
    GeneratorSpec uni;
    uni.family = ScenarioFamily::uniform;
    uni.count = 60;
    uni.seed = 31;
    uni.lower = Matrix(2, 2);
    uni.lower << 1.0, 0.5, 4.0, 0.5;
    uni.upper = Matrix(2, 2);
    uni.upper << 1.0, 5.5, 4.0, 1.5;
    GeneratorSpec tri = uni;
    tri.family = ScenarioFamily::triangular;
    tri.mode = 0.5 * (uni.lower + uni.upper);

    const FairnessParams params = FairnessParams::coupled(2.0, 0.95, 1e-7);
    const double v_uni = solve_saa(inst, generate(uni), params, 31).objective;
    const double v_tri = solve_saa(inst, generate(tri), params, 31).objective;
    CHECK(v_tri >= v_uni - 1e-9);
}

TEST_CASE("worst case never beats the average case") {
    const ResourceInstance inst = ft::toy_instance();
    const ScenarioSet s = demo_pair(0);
    const FairnessParams params = FairnessParams::coupled(2.0, 1.0, 1e-7);
    const double rob = solve_robust(inst, s, params, 37).objective;
    const double saa = solve_saa(inst, s, params, 37).objective;
    CHECK(rob <= saa + 1e-6);
}

TEST_CASE("leftovers") {
    const ResourceInstance inst = ft::toy_instance();
    const ScenarioSet s = demo_pair(0);
    const DiscreteDistribution truth = DiscreteDistribution::uniform(2);

    SUBCASE("zero allocation leaves everything") {
        SolveReport rep;
        rep.allocation.x = Vector::Zero(2);
        const Vector left = leftovers(rep, s, inst, truth);
        CHECK(left[0] == doctest::Approx(9.0).epsilon(1e-15));
        CHECK(left[1] == doctest::Approx(18.0).epsilon(1e-15));
    }
    SUBCASE("binding deterministic allocation leaves nothing on binding rows") {
        ResourceInstance one;
        one.users = 1;
        one.capacities = Vector::Constant(1, 8.0);
        Matrix r(1, 1);
        r << 2.0;
        ScenarioSet single;
        single.scenarios = {r};
        SolveReport rep;
        rep.allocation.x = Vector::Constant(1, 4.0);
        CHECK(leftovers(rep, single, one, DiscreteDistribution::uniform(1))[0] ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("per-scenario clamping") {
        // allocation overshoots capacity in the high branch; the shortfall
        // does not cancel the low-branch leftover
        SolveReport rep;
        rep.allocation.x = Vector(2);
        rep.allocation.x << 1.0, 2.0;  // high branch resource 1: 12 > 9
        const Vector left = leftovers(rep, s, inst, truth);
        // low branch leftover on resource 1 is 9 - 2 = 7, high branch 0
        CHECK(left[0] == doctest::Approx(3.5).epsilon(1e-12));
    }
}
