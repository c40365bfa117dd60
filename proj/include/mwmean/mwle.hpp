/*
 * Copyright (c) 2026, The mwmean Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwmean/expfam.hpp"

namespace mwmean {

enum class PolicyKind { holder, lehmer, custom };

// Rule producing the likelihood weights u(x) from the data alone.
//   holder: u(x_i) = w(x_i)
//   lehmer: u(x_{i,j}) = w(x_{i,j}) x_{i,j}^{alpha_j - 1}, one column per component
//   custom: u(x_i) = custom(x_i)
// base_w receives the observation it weights: the whole row for holder, a
// single entry for lehmer. Empty base_w means w = 1.
struct WeightPolicy {
    using WeightFn = std::function<double(std::span<const double>)>;

    PolicyKind kind = PolicyKind::holder;
    WeightFn base_w;
    std::vector<double> exponents;  // lehmer only; a single entry is broadcast
    WeightFn custom;

    static WeightPolicy holder(WeightFn w = {});
    static WeightPolicy lehmer(std::vector<double> exponents, WeightFn w = {});
    static WeightPolicy make_custom(WeightFn u);
};

// n x 1 weights for holder/custom, n x k per-column weights for lehmer.
Matrix apply_policy(const WeightPolicy& policy, const Matrix& observations);

// sum u T(x_i) / sum u, compensated.
MomentTarget weighted_stat_mean(const FamilyModel& model, const WeightedDataset& data);

struct FitDiagnostics {
    int iterations = 0;
    double residual = 0.0;            // |r(eta_hat) - target|_inf
    double hessian_min_eigenvalue = 0.0;
    double hessian_max_eigenvalue = 0.0;
    MinimalityVerdict minimality;
    SolverPath path = SolverPath::closed_form;
    bool used_bisection = false;
    std::vector<std::string> warnings;
};

struct FitResult {
    Vector theta_hat;
    Vector eta_hat;
    MomentTarget target;
    FitDiagnostics diagnostics;
};

struct FitOptions {
    SolverOptions solver;
    double minimality_rel_tol = 1e-8;
};

// MWLE for a dataset whose weights are already computed.
FitResult fit_weighted(const FamilyModel& model, const WeightedDataset& data,
                       const FitOptions& options = {});

// theta_hat = eta^{-1}(r^{-1}(weighted_stat_mean)). Lehmer policies are fitted
// column by column through the model's marginals.
FitResult fit(const FamilyModel& model, const Matrix& observations, const WeightPolicy& policy,
              const FitOptions& options = {});

struct SubclassReport {
    bool is_holder_mean = false;
    bool is_lehmer_mean = false;
    std::string reason;
};

// Structural check of whether the MWLE of (model, policy) reduces to a
// Hölder or Lehmer mean. When observations are given the policy is also
// validated on them.
SubclassReport subclass_form(const FamilyModel& model, const WeightPolicy& policy,
                             const std::optional<Matrix>& observations = std::nullopt);

}  // namespace mwmean
