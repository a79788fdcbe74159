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

#include "fairalloc/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fairalloc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_eval_inputs(const Vector& x, const Vector& mu, double beta) {
    if (x.size() != mu.size()) {
        std::ostringstream os;
        os << "eval_fairness: x length " << x.size() << " does not match mu length " << mu.size();
        throw Error(os.str());
    }
    if (x.size() == 0) throw Error("eval_fairness: empty allocation");
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
        if (!(mu[j] > 0.0) || !std::isfinite(mu[j])) {
            std::ostringstream os;
            os << "eval_fairness: mu[" << j << "] must be positive and finite, got " << mu[j];
            throw Error(os.str());
        }
        if (!(x[j] >= 0.0) || !std::isfinite(x[j])) {
            std::ostringstream os;
            os << "eval_fairness: x[" << j << "] must be finite and >= 0, got " << x[j];
            throw Error(os.str());
        }
    }
    if (std::abs(beta) > kBetaMagnitudeCap) {
        std::ostringstream os;
        os << "eval_fairness: |beta| capped at " << kBetaMagnitudeCap
           << " (use the max/min-ratio limit regimes beyond), got " << beta;
        throw Error(os.str());
    }
}

// log(sum exp(v_i)) with a max shift, over the first n entries.
double logsumexp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double e : v) m = std::max(m, e);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double e : v) s += std::exp(e - m);
    return m + std::log(s);
}

double entropy_form(const Vector& y, double S, double lambda) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        if (y[j] > 0.0) {
            const double t = y[j] / S;
            h -= t * std::log(t);
        }
    }
    return std::exp(h) * std::pow(S, lambda);
}

}  // namespace

std::string to_string(FairnessRegime regime) {
    switch (regime) {
        case FairnessRegime::generic: return "generic";
        case FairnessRegime::beta_one: return "beta_one";
        case FairnessRegime::beta_zero_entropy: return "beta_zero_entropy";
        case FairnessRegime::jain_minus_one: return "jain_minus_one";
        case FairnessRegime::max_ratio_inf: return "max_ratio_inf";
        case FairnessRegime::min_ratio_neg_inf: return "min_ratio_neg_inf";
        case FairnessRegime::coupled_cancel: return "coupled_cancel";
    }
    return "unknown";
}

FairnessValue eval_fairness(const Vector& x, const Vector& mu, double beta, double lambda) {
    check_eval_inputs(x, mu, beta);
    const Vector y = mu.array() * x.array();
    const double S = y.sum();
    if (!(S > 0.0)) throw Error("eval_fairness: all-zero allocation (S = 0)");

    if (std::abs(beta - 1.0) <= kBetaOneWindow)
        return {std::pow(S, lambda), FairnessRegime::beta_one};
    if (std::abs(beta) <= kBetaZeroWindow)
        return {entropy_form(y, S, lambda), FairnessRegime::beta_zero_entropy};

    const double sign = beta < 1.0 ? 1.0 : -1.0;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(y.size()));
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        if (y[j] > 0.0) {
            terms.push_back((1.0 - beta) * std::log(y[j] / S));
        } else if (beta > 1.0) {
            // t_j^(1-beta) diverges: boundary sentinel, not an error.
            return {kNegInf, FairnessRegime::generic};
        }
        // beta < 1: a zero share contributes 0 to the power sum.
    }
    const double log_mag = logsumexp(terms) / beta + lambda * std::log(S);
    return {sign * std::exp(log_mag), FairnessRegime::generic};
}

double eval_special(const Vector& x, const Vector& mu, FairnessRegime regime, double lambda) {
    check_eval_inputs(x, mu, 0.0);
    const Vector y = mu.array() * x.array();
    const double S = y.sum();
    if (!(S > 0.0)) throw Error("eval_special: all-zero allocation (S = 0)");

    switch (regime) {
        case FairnessRegime::beta_one:
            return std::pow(S, lambda);
        case FairnessRegime::beta_zero_entropy:
            return entropy_form(y, S, lambda);
        case FairnessRegime::jain_minus_one: {
            if ((y.array() <= 0.0).any())
                throw Error("eval_special: Jain form requires strictly positive dominant shares");
            return std::pow(S, lambda + 2.0) / y.array().square().sum();
        }
        case FairnessRegime::max_ratio_inf: {
            if ((y.array() <= 0.0).any())
                throw Error("eval_special: max-ratio form requires strictly positive dominant shares");
            return -std::pow(S, lambda + 1.0) / y.minCoeff();
        }
        case FairnessRegime::min_ratio_neg_inf: {
            if ((y.array() <= 0.0).any())
                throw Error("eval_special: min-ratio form requires strictly positive dominant shares");
            return std::pow(S, lambda + 1.0) / y.maxCoeff();
        }
        default:
            throw Error("eval_special: regime " + to_string(regime) + " has no closed form here");
    }
}

double eval_coupled(const Vector& x, const Vector& mu, double beta) {
    check_eval_inputs(x, mu, beta);
    if (std::abs(beta - 1.0) <= kBetaOneWindow)
        throw Error("eval_coupled: beta must differ from 1");
    if (std::abs(beta) <= kBetaZeroWindow)
        throw Error("eval_coupled: beta must differ from 0");

    const Vector y = mu.array() * x.array();
    if (!(y.sum() > 0.0)) throw Error("eval_coupled: all-zero allocation");
    const double sign = beta < 1.0 ? 1.0 : -1.0;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(y.size()));
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        if (y[j] > 0.0) {
            terms.push_back((1.0 - beta) * std::log(y[j]));
        } else if (beta > 1.0) {
            return kNegInf;
        }
    }
    return sign * std::exp(logsumexp(terms) / beta);
}

double expected_fairness_mu(const Vector& x, const Matrix& mu_rows, const Vector& p, double beta,
                            double lambda) {
    if (mu_rows.rows() != p.size())
        throw Error("expected_fairness: distribution length does not match scenario count");
    double acc = 0.0;
    for (Eigen::Index w = 0; w < p.size(); ++w) {
        if (p[w] <= 0.0) continue;
        const double f = eval_fairness(x, mu_rows.row(w).transpose(), beta, lambda).value;
        if (!std::isfinite(f)) return kNegInf;
        acc += p[w] * f;
    }
    return acc;
}

double expected_fairness(const Vector& x, const ScenarioSet& scenarios,
                         const ResourceInstance& instance, const DiscreteDistribution& p,
                         double beta, double lambda) {
    p.validate();
    return expected_fairness_mu(x, mu_table(instance, scenarios), p.p, beta, lambda);
}

double eval_fds_deterministic(const Vector& x, const Matrix& requirements,
                              const ResourceInstance& instance, double beta, double lambda) {
    return eval_fairness(x, derive_shares(instance, requirements).mu, beta, lambda).value;
}

Vector fairness_gradient(const Vector& x, const Vector& mu, double beta, double lambda) {
    check_eval_inputs(x, mu, beta);
    if (std::abs(beta) <= kBetaZeroWindow)
        throw Error("fairness_gradient: no analytic form at beta = 0; use finite differences");
    const Vector y = mu.array() * x.array();
    const double S = y.sum();
    if (!(S > 0.0)) throw Error("fairness_gradient: all-zero allocation");

    if (std::abs(beta - 1.0) <= kBetaOneWindow)
        return (lambda * std::pow(S, lambda - 1.0)) * mu;

    if ((y.array() <= 0.0).any())
        throw Error("fairness_gradient: requires strictly positive allocations");

    // F = sign(1-beta) B^(1/beta) S^kappa with B = sum y^(1-beta),
    // kappa = lambda + (beta-1)/beta.
    const double kappa = lambda + (beta - 1.0) / beta;
    std::vector<double> terms(static_cast<std::size_t>(y.size()));
    Vector logy(y.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        logy[j] = std::log(y[j]);
        terms[static_cast<std::size_t>(j)] = (1.0 - beta) * logy[j];
    }
    const double logB = logsumexp(terms);
    const double sign = beta < 1.0 ? 1.0 : -1.0;
    const double f = sign * std::exp(logB / beta + kappa * std::log(S));

    Vector grad(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double ratio = std::exp(-beta * logy[k] - logB);  // y_k^-beta / B
        grad[k] = f * mu[k] * (((1.0 - beta) / beta) * ratio + kappa / S);
    }
    return grad;
}

Vector expected_fairness_gradient(const Vector& x, const Matrix& mu_rows, const Vector& p,
                                  double beta, double lambda) {
    if (mu_rows.rows() != p.size())
        throw Error("expected_fairness_gradient: distribution length does not match scenario count");
    Vector grad = Vector::Zero(x.size());
    for (Eigen::Index w = 0; w < p.size(); ++w) {
        if (p[w] <= 0.0) continue;
        grad += p[w] * fairness_gradient(x, mu_rows.row(w).transpose(), beta, lambda);
    }
    return grad;
}

}  // namespace fairalloc
