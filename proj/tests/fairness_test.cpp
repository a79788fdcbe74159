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

#include "fairalloc/fairness.hpp"
#include "support/test_support.hpp"

#include <random>

using namespace fairalloc;
namespace ft = fairalloc::testing;

namespace {
Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}
Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}
}  // namespace

TEST_CASE("equal shares at beta=2, lambda=-1/2") {
    // fairness factor d = 2, S = 1, sign = -1
    const FairnessValue f = eval_fairness(vec2(1, 1), vec2(0.5, 0.5), 2.0, -0.5);
    CHECK(f.value == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(f.regime == FairnessRegime::generic);
}

TEST_CASE("beta=1 ignores fairness") {
    const Vector x = vec2(2.0, 3.0);
    const Vector mu = vec2(0.4, 0.2);
    const double S = 0.4 * 2 + 0.2 * 3;
    for (double lambda : {-0.5, 0.0, 1.0, 2.0}) {
        const FairnessValue f = eval_fairness(x, mu, 1.0, lambda);
        CHECK(f.regime == FairnessRegime::beta_one);
        CHECK(f.value == doctest::Approx(std::pow(S, lambda)).epsilon(1e-14));
    }
}

TEST_CASE("log-space evaluation matches the direct formula") {
    const Vector x = vec2(1.0, 2.0);
    const Vector mu = vec2(0.3, 0.6);
    const double got = eval_fairness(x, mu, 2.0, -0.5).value;
    const double want = ft::direct_fairness(x, mu, 2.0, -0.5);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got == doctest::Approx(-2.0412414523193148).epsilon(1e-12));

    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        Vector xr(3), mur(3);
        for (int j = 0; j < 3; ++j) {
            xr[j] = ft::urand(rng, 0.05, 8.0);
            mur[j] = ft::urand(rng, 0.05, 1.0);
        }
        const double beta = ft::urand(rng, -3.0, 4.0);
        if (std::abs(beta - 1.0) < 5e-3 || std::abs(beta) < 5e-3) continue;
        const double lambda = ft::urand(rng, -1.5, 1.5);
        const double a = eval_fairness(xr, mur, beta, lambda).value;
        const double b = ft::direct_fairness(xr, mur, beta, lambda);
        CHECK(a == doctest::Approx(b).epsilon(1e-11));
    }
}

TEST_CASE("boundary sentinel and errors") {
    CHECK(eval_fairness(vec2(0.0, 1.0), vec2(0.5, 0.5), 2.0, -0.5).value ==
          -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(eval_fairness(vec2(0.0, 0.0), vec2(0.5, 0.5), 2.0, -0.5), Error);
    CHECK_THROWS_AS(eval_fairness(vec2(1.0, 1.0), vec2(0.0, 0.5), 2.0, -0.5), Error);
    CHECK_THROWS_AS(eval_fairness(vec2(1.0, 1.0), vec2(0.5, 0.5), 101.0, -0.5), Error);
    // beta < 1 tolerates zero coordinates
    CHECK(std::isfinite(eval_fairness(vec2(0.0, 1.0), vec2(0.5, 0.5), 0.5, -0.5).value));
}

TEST_CASE("closed-form specializations") {
    const Vector ones = vec2(1.0, 1.0);

    SUBCASE("jain at y=(1,1), lambda=0") {
        const double v = eval_special(ones, ones, FairnessRegime::jain_minus_one, 0.0);
        CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
        // agrees with the generic beta = -1 evaluation
        CHECK(eval_fairness(ones, ones, -1.0, 0.0).value == doctest::Approx(v).epsilon(1e-14));
    }
    SUBCASE("max ratio at y=(1,1), lambda=0") {
        CHECK(eval_special(ones, ones, FairnessRegime::max_ratio_inf, 0.0) ==
              doctest::Approx(-2.0).epsilon(1e-14));
    }
    SUBCASE("entropy at y=(0.5,0.5), lambda=0") {
        CHECK(eval_special(ones, vec2(0.5, 0.5), FairnessRegime::beta_zero_entropy, 0.0) ==
              doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("min ratio") {
        // y = (1, 2): S^(lambda+1) / max y = 3 / 2 at lambda = 0
        CHECK(eval_special(vec2(1.0, 2.0), ones, FairnessRegime::min_ratio_neg_inf, 0.0) ==
              doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("ratio regimes require positive shares") {
        CHECK_THROWS_AS(eval_special(vec2(0.0, 1.0), ones, FairnessRegime::jain_minus_one, 0.0),
                        Error);
    }
}

TEST_CASE("coupled cancellation form") {
    CHECK(eval_coupled(vec2(1, 1), vec2(0.5, 0.5), 2.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(eval_coupled(vec2(1, 1), vec2(1.0, 1.0), 2.0) ==
          doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(eval_coupled(vec2(1, 1), vec2(0.5, 0.5), 1.0), Error);

    // identity with the generic form at lambda = (1-beta)/beta
    const Vector x = vec3(1.0, 1.0, 1.0);
    const Vector mu = vec3(0.3, 0.6, 0.9);
    const double a = eval_coupled(x, mu, 3.0);
    const double b = eval_fairness(x, mu, 3.0, -2.0 / 3.0).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(a == doctest::Approx(ft::direct_coupled(x, mu, 3.0)).epsilon(1e-12));

    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        Vector xr(4), mur(4);
        for (int j = 0; j < 4; ++j) {
            xr[j] = ft::urand(rng, 0.1, 5.0);
            mur[j] = ft::urand(rng, 0.05, 1.0);
        }
        const double beta = ft::urand(rng, 1.2, 6.0);
        CHECK(eval_coupled(xr, mur, beta) ==
              doctest::Approx(eval_fairness(xr, mur, beta, (1.0 - beta) / beta).value)
                  .epsilon(1e-10));
    }
}

TEST_CASE("expected fairness") {
    SUBCASE("degenerate distribution") {
        Matrix mus(1, 2);
        mus << 0.5, 0.5;
        const double v = expected_fairness_mu(vec2(1, 1), mus, Vector::Ones(1), 2.0, -0.5);
        CHECK(v == doctest::Approx(-2.0).epsilon(1e-14));
    }
    SUBCASE("identical dominant shares mix to the single-scenario value") {
        Matrix mus(2, 2);
        mus << 0.5, 0.5, 0.5, 0.5;
        Vector p = vec2(0.5, 0.5);
        CHECK(expected_fairness_mu(vec2(1, 1), mus, p, 2.0, -0.5) ==
              doctest::Approx(-2.0).epsilon(1e-14));
    }
    SUBCASE("linear mixing") {
        // scenario values -2 and -4 under weights (0.3, 0.7)
        Matrix mus(2, 2);
        mus << 0.5, 0.5, 0.125, 0.125;
        Vector p = vec2(0.3, 0.7);
        CHECK(expected_fairness_mu(vec2(1, 1), mus, p, 2.0, -0.5) ==
              doctest::Approx(-3.4).epsilon(1e-13));
    }
    SUBCASE("minus infinity propagates when weighted") {
        Matrix mus(2, 2);
        mus << 0.5, 0.5, 0.25, 0.25;
        CHECK(expected_fairness_mu(vec2(0.0, 1.0), mus, vec2(0.5, 0.5), 2.0, -0.5) ==
              -std::numeric_limits<double>::infinity());
        // zero-weight scenarios cannot poison the expectation: the x is
        // fine here, only weights vary
        CHECK(std::isfinite(expected_fairness_mu(vec2(1.0, 1.0), mus, vec2(0.0, 1.0), 2.0, -0.5)));
    }
}

TEST_CASE("deterministic objective via dominant shares") {
    ResourceInstance inst = ft::toy_instance();
    Matrix r(2, 2);
    r << 1.0, 3.0, 4.0, 1.0;
    // mu = (2/9, 1/3)
    const Vector mu = vec2(2.0 / 9.0, 1.0 / 3.0);
    Vector x = vec2(3.0, 2.0);

    const double fds = eval_fds_deterministic(x, r, inst, 2.0, -0.5);
    CHECK(fds == doctest::Approx(eval_coupled(x, mu, 2.0)).epsilon(1e-12));
    CHECK(eval_fds_deterministic(x, r, inst, 1.0, -0.5) ==
          doctest::Approx(std::pow(mu.dot(x), -0.5)).epsilon(1e-13));

    // single user: sign(1-beta) (mu x)^lambda for any beta
    ResourceInstance one;
    one.users = 1;
    one.capacities = Vector(1);
    one.capacities << 8.0;
    Matrix r1(1, 1);
    r1 << 2.0;
    Vector x1(1);
    x1 << 3.0;
    for (double beta : {0.5, 2.0, -1.0, 5.0}) {
        const double sign = beta < 1.0 ? 1.0 : -1.0;
        CHECK(eval_fds_deterministic(x1, r1, one, beta, -0.5) ==
              doctest::Approx(sign * std::pow(0.25 * 3.0, -0.5)).epsilon(1e-12));
    }
}

TEST_CASE("positive scaling moves the value by alpha^lambda") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        Vector x(3), mu(3);
        for (int j = 0; j < 3; ++j) {
            x[j] = ft::urand(rng, 0.1, 5.0);
            mu[j] = ft::urand(rng, 0.05, 1.0);
        }
        const double beta = ft::urand(rng, 1.1, 8.0);
        const double lambda = ft::urand(rng, -1.5, 1.0);
        const double alpha = ft::urand(rng, 0.2, 4.0);
        const double base = eval_fairness(x, mu, beta, lambda).value;
        const double scaled = eval_fairness((alpha * x).eval(), mu, beta, lambda).value;
        CHECK(scaled == doctest::Approx(std::pow(alpha, lambda) * base).epsilon(1e-10));
    }
}

TEST_CASE("pointwise monotonicity in beta above 1") {
    std::mt19937_64 rng(23);
    const std::vector<double> betas = {1.01, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0};
    for (int t = 0; t < 100; ++t) {
        const int d = 2 + static_cast<int>(rng() % 4);
        Vector x(d), mu(d);
        for (int j = 0; j < d; ++j) {
            x[j] = ft::urand(rng, 0.05, 5.0);
            mu[j] = ft::urand(rng, 0.05, 1.0);
        }
        const double lambda = ft::urand(rng, -1.0, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double beta : betas) {
            const double v = eval_fairness(x, mu, beta, lambda).value;
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("limit consistency") {
    const Vector x = vec3(1.0, 2.0, 0.7);
    const Vector mu = vec3(0.3, 0.25, 0.6);
    const double S = mu.dot(x);

    SUBCASE("beta near 1 collapses to the beta=1 form") {
        const double want = eval_special(x, mu, FairnessRegime::beta_one, -0.5);
        for (double beta : {1.0 - 1e-4, 1.0 + 1e-4}) {
            const double got = eval_fairness(x, mu, beta, -0.5).value;
            CHECK(std::abs(got - want) <= 1e-3 * std::abs(std::pow(S, -0.5)));
        }
    }
    SUBCASE("small beta approaches the entropy form") {
        const double want = eval_special(x, mu, FairnessRegime::beta_zero_entropy, -0.5);
        const double got = eval_fairness(x, mu, 1e-3, -0.5).value;
        CHECK(std::abs(got - want) <= 1e-2 * std::abs(want));
    }
    SUBCASE("beta=50 coupled approaches the max-ratio form on balanced shares") {
        // away from ties the two forms differ by (k t_min)^(1/beta),
        // which only closes near equalized dominant shares
        const Vector xb = vec3(1.0, 1.001, 0.999);
        const Vector mub = vec3(1.0, 1.0, 1.0);
        const double beta = 50.0;
        const double got = eval_coupled(xb, mub, beta);
        const double want =
            eval_special(xb, mub, FairnessRegime::max_ratio_inf, (1.0 - beta) / beta);
        CHECK(std::abs(got - want) <= 1e-2 * std::abs(want));

        // exact ties agree exactly
        const Vector xe = vec2(1.0, 1.0);
        const Vector mue = vec2(1.0, 1.0);
        CHECK(eval_coupled(xe, mue, beta) ==
              doctest::Approx(
                  eval_special(xe, mue, FairnessRegime::max_ratio_inf, (1.0 - beta) / beta))
                  .epsilon(1e-12));
    }
    SUBCASE("generic beta=-1 equals the Jain form") {
        const double got = eval_fairness(x, mu, -1.0, 0.3).value;
        const double want = eval_special(x, mu, FairnessRegime::jain_minus_one, 0.3);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("concavity in x under coupled lambda, beta > 1") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const int d = 2 + static_cast<int>(rng() % 3);
        const int n = 1 + static_cast<int>(rng() % 4);
        Matrix mus(n, d);
        Vector p(n);
        for (int w = 0; w < n; ++w) {
            p[w] = ft::urand(rng, 0.1, 1.0);
            for (int j = 0; j < d; ++j) mus(w, j) = ft::urand(rng, 0.05, 1.0);
        }
        p /= p.sum();
        Vector x(d), y(d);
        for (int j = 0; j < d; ++j) {
            x[j] = ft::urand(rng, 0.05, 5.0);
            y[j] = ft::urand(rng, 0.05, 5.0);
        }
        const double beta = ft::urand(rng, 1.2, 6.0);
        const double lambda = (1.0 - beta) / beta;
        const double delta = ft::urand(rng, 0.05, 0.95);
        const Vector mid = delta * x + (1.0 - delta) * y;
        const double lhs = expected_fairness_mu(mid, mus, p, beta, lambda);
        const double rhs = delta * expected_fairness_mu(x, mus, p, beta, lambda) +
                           (1.0 - delta) * expected_fairness_mu(y, mus, p, beta, lambda);
        CHECK(lhs >= rhs - 1e-10);
    }
}

TEST_CASE("permutation symmetry") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 50; ++t) {
        const int d = 3 + static_cast<int>(rng() % 3);
        Vector x(d), mu(d);
        for (int j = 0; j < d; ++j) {
            x[j] = ft::urand(rng, 0.1, 4.0);
            mu[j] = ft::urand(rng, 0.1, 1.0);
        }
        const double beta = ft::urand(rng, -2.0, 3.0);
        if (std::abs(beta - 1.0) < 5e-3 || std::abs(beta) < 5e-3) continue;
        std::vector<int> perm(static_cast<std::size_t>(d));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Vector xp(d), mup(d);
        for (int j = 0; j < d; ++j) {
            xp[j] = x[perm[static_cast<std::size_t>(j)]];
            mup[j] = mu[perm[static_cast<std::size_t>(j)]];
        }
        CHECK(eval_fairness(x, mu, beta, -0.5).value ==
              doctest::Approx(eval_fairness(xp, mup, beta, -0.5).value).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match finite differences") {
    std::mt19937_64 rng(59);
    for (int t = 0; t < 60; ++t) {
        const int d = 2 + static_cast<int>(rng() % 3);
        Vector x(d), mu(d);
        for (int j = 0; j < d; ++j) {
            x[j] = ft::urand(rng, 0.2, 4.0);
            mu[j] = ft::urand(rng, 0.1, 1.0);
        }
        double beta = ft::urand(rng, -2.0, 5.0);
        if (std::abs(beta) < 0.05) beta = 0.5;
        if (std::abs(beta - 1.0) < 0.05) beta = 2.0;
        const double lambda = ft::urand(rng, -1.5, 1.0);

        const Vector g = fairness_gradient(x, mu, beta, lambda);
        for (int j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, x[j]);
            Vector xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double fd = (eval_fairness(xp, mu, beta, lambda).value -
                               eval_fairness(xm, mu, beta, lambda).value) /
                              (2.0 * h);
            CHECK(g[j] == doctest::Approx(fd).epsilon(5e-5));
        }
    }

    SUBCASE("beta = 1 gradient") {
        const Vector x = vec2(2.0, 1.0);
        const Vector mu = vec2(0.25, 0.5);
        const Vector g = fairness_gradient(x, mu, 1.0, -0.5);
        const double S = mu.dot(x);
        for (int j = 0; j < 2; ++j)
            CHECK(g[j] == doctest::Approx(-0.5 * std::pow(S, -1.5) * mu[j]).epsilon(1e-12));
    }

    SUBCASE("expected gradient is the weighted sum") {
        Matrix mus(2, 2);
        mus << 0.5, 0.25, 0.3, 0.6;
        const Vector p = vec2(0.4, 0.6);
        const Vector x = vec2(1.5, 2.5);
        const Vector g = expected_fairness_gradient(x, mus, p, 2.0, -0.5);
        const Vector want = 0.4 * fairness_gradient(x, mus.row(0).transpose(), 2.0, -0.5) +
                            0.6 * fairness_gradient(x, mus.row(1).transpose(), 2.0, -0.5);
        CHECK(g[0] == doctest::Approx(want[0]).epsilon(1e-13));
        CHECK(g[1] == doctest::Approx(want[1]).epsilon(1e-13));
    }
}
