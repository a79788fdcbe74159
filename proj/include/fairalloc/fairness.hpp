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

#include "fairalloc/shares.hpp"
#include "fairalloc/types.hpp"

namespace fairalloc {

// The generic power form overflows double precision well before |beta|
// reaches this cap; beyond it callers must use the limit regimes.
inline constexpr double kBetaMagnitudeCap = 100.0;

// The generic form is discontinuous at beta = 1 (its one-sided limits are
// +/- d * S^lambda); values this close to 1 collapse to the beta = 1
// specialization S^lambda.
inline constexpr double kBetaOneWindow = 2e-4;

// Below this magnitude beta switches to the entropy closed form.
inline constexpr double kBetaZeroWindow = 1e-9;

enum class FairnessRegime {
    generic,
    beta_one,
    beta_zero_entropy,
    jain_minus_one,
    max_ratio_inf,
    min_ratio_neg_inf,
    coupled_cancel,
};

std::string to_string(FairnessRegime regime);

/// Value of the combined fairness-efficiency function together with the
/// formula branch that produced it.  The value is -inf exactly when some
/// x_j = 0 under beta > 1 (a boundary iterate a solver must reject).
struct FairnessValue {
    double value = 0.0;
    FairnessRegime regime = FairnessRegime::generic;
};

/// Combined fairness-efficiency of an allocation against dominant
/// requirements mu:
///
///   F = sign(1-beta) * (sum_j t_j^(1-beta))^(1/beta) * S^lambda,
///   y_j = mu_j x_j,  S = sum_j y_j,  t_j = y_j / S.
///
/// Power sums are evaluated in log space with a max shift.  beta within
/// kBetaOneWindow of 1 returns S^lambda; |beta| below kBetaZeroWindow
/// returns the entropy form exp(H(t)) S^lambda.
FairnessValue eval_fairness(const Vector& x, const Vector& mu, double beta, double lambda);

/// Closed-form specializations: beta_one -> S^lambda; beta_zero_entropy ->
/// exp(H(t)) S^lambda; jain_minus_one -> S^(lambda+2) / sum_j y_j^2;
/// max_ratio_inf -> -S^(lambda+1) max_j 1/y_j; min_ratio_neg_inf ->
/// S^(lambda+1) min_j 1/y_j.
double eval_special(const Vector& x, const Vector& mu, FairnessRegime regime, double lambda);

/// The lambda = (1-beta)/beta cancellation form
/// sign(1-beta) * (sum_j y_j^(1-beta))^(1/beta); the scale factor S drops
/// out.  Agrees with eval_fairness at the coupled lambda.
double eval_coupled(const Vector& x, const Vector& mu, double beta);

/// sum_w p^w F(x, mu^w); -inf as soon as a scenario with positive weight
/// evaluates to -inf.
double expected_fairness(const Vector& x, const ScenarioSet& scenarios,
                         const ResourceInstance& instance, const DiscreteDistribution& p,
                         double beta, double lambda);

/// Same expectation evaluated off a precomputed mu table (row w = mu^w).
double expected_fairness_mu(const Vector& x, const Matrix& mu_rows, const Vector& p, double beta,
                            double lambda);

/// Deterministic objective: F at the dominant shares of a fixed
/// requirement matrix.
double eval_fds_deterministic(const Vector& x, const Matrix& requirements,
                              const ResourceInstance& instance, double beta, double lambda);

/// Analytic gradient of F(x, mu) with respect to x, valid on x > 0 for
/// beta outside the beta-zero window:
///
///   dF/dx_k = F(x) * mu_k * [ ((1-beta)/beta) y_k^-beta / B + kappa / S ],
///   B = sum_j y_j^(1-beta),  kappa = lambda + (beta-1)/beta.
///
/// For beta = 1 (within the window) this degenerates to lambda S^(lambda-1) mu.
Vector fairness_gradient(const Vector& x, const Vector& mu, double beta, double lambda);

/// Gradient of sum_w p^w F(x, mu^w); rows of mu_rows are per-scenario mu.
Vector expected_fairness_gradient(const Vector& x, const Matrix& mu_rows, const Vector& p,
                                  double beta, double lambda);

}  // namespace fairalloc
