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
#include "mwmean/mwle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mwmean/error.hpp"
#include "mwmean/numeric.hpp"

namespace mwmean {

namespace {

double log_base_weight(const WeightPolicy::WeightFn& w, std::span<const double> x) {
    if (!w) return 0.0;
    const double v = w(x);
    if (!std::isfinite(v) || v <= 0.0) throw DomainError("base weight w(x) must be finite and positive");
    return std::log(v);
}

double lehmer_exponent(const WeightPolicy& policy, Eigen::Index j, Eigen::Index k) {
    if (policy.exponents.size() == 1) return policy.exponents.front();
    if (static_cast<Eigen::Index>(policy.exponents.size()) != k) {
        throw ConfigError("lehmer policy needs one exponent or one per component (" +
                          std::to_string(k) + "), got " + std::to_string(policy.exponents.size()));
    }
    return policy.exponents[static_cast<std::size_t>(j)];
}

// Natural log of u. Columns as in apply_policy.
Matrix log_policy_weights(const WeightPolicy& policy, const Matrix& obs) {
    const Eigen::Index n = obs.rows();
    const Eigen::Index k = obs.cols();
    if (n < 1) throw DomainError("no observations");
    switch (policy.kind) {
        case PolicyKind::holder:
        case PolicyKind::custom: {
            const auto& fn = policy.kind == PolicyKind::holder ? policy.base_w : policy.custom;
            if (policy.kind == PolicyKind::custom && !fn) throw ConfigError("custom policy has no weight map");
            Matrix lu(n, 1);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::RowVectorXd row = obs.row(i);
                lu(i, 0) = log_base_weight(fn, std::span<const double>(row.data(), static_cast<std::size_t>(k)));
            }
            return lu;
        }
        case PolicyKind::lehmer:
            break;
    }
    if (policy.exponents.empty()) throw ConfigError("lehmer policy needs exponents");
    Matrix lu(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double alpha = lehmer_exponent(policy, j, k);
        if (!std::isfinite(alpha)) throw ConfigError("lehmer exponent must be finite");
        const double p = alpha - 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = obs(i, j);
            const double lw = log_base_weight(policy.base_w, std::span<const double>(&x, 1));
            if (p == 0.0) {
                lu(i, j) = lw;
            } else if (x > 0.0) {
                lu(i, j) = lw + p * std::log(x);
            } else {
                throw DomainError("lehmer weight x^(" + shortest_repr(p) + ") undefined or zero at row " +
                                  std::to_string(i) + ", column " + std::to_string(j) +
                                  " (value " + shortest_repr(x) + ")");
            }
        }
    }
    return lu;
}

// exp(log u - max log u): same estimate, no overflow at extreme orders.
Vector normalized_weights(const Eigen::Ref<const Vector>& log_u) {
    return (log_u.array() - log_u.maxCoeff()).exp();
}

void append_prefixed(std::vector<std::string>& out, const std::vector<std::string>& in,
                     const std::string& prefix) {
    for (const auto& w : in) out.push_back(prefix + w);
}

}  // namespace

WeightPolicy WeightPolicy::holder(WeightFn w) {
    WeightPolicy p;
    p.kind = PolicyKind::holder;
    p.base_w = std::move(w);
    return p;
}

WeightPolicy WeightPolicy::lehmer(std::vector<double> exponents, WeightFn w) {
    WeightPolicy p;
    p.kind = PolicyKind::lehmer;
    p.exponents = std::move(exponents);
    p.base_w = std::move(w);
    return p;
}

WeightPolicy WeightPolicy::make_custom(WeightFn u) {
    WeightPolicy p;
    p.kind = PolicyKind::custom;
    p.custom = std::move(u);
    return p;
}

Matrix apply_policy(const WeightPolicy& policy, const Matrix& observations) {
    Matrix u = log_policy_weights(policy, observations).array().exp();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double v = u.data()[i];
        if (!std::isfinite(v) || v <= 0.0) {
            throw NumericError("policy weight overflows or underflows double precision");
        }
    }
    return u;
}

MomentTarget weighted_stat_mean(const FamilyModel& model, const WeightedDataset& data) {
    const Eigen::Index q = model.dim_eta();
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(q));
    CompensatedSum total;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const double u = data.weights()[i];
        const Vector t = model.stat(data.observations().row(i).transpose());
        for (Eigen::Index j = 0; j < q; ++j) acc[j] += u * t[j];
        total += u;
    }
    Vector m(q);
    for (Eigen::Index j = 0; j < q; ++j) m[j] = acc[j].value() / total.value();
    if (!m.allFinite()) throw NumericError("weighted mean of sufficient statistics is not finite");
    return {std::move(m)};
}

FitResult fit_weighted(const FamilyModel& model, const WeightedDataset& data,
                       const FitOptions& options) {
    if (!model.def().nat_param_bijective) {
        throw ConfigError("model " + model.name() + " declares a non-bijective parameterization");
    }
    if (data.dim() != model.dim_x()) {
        throw DomainError("data has " + std::to_string(data.dim()) + " columns, model " +
                          model.name() + " expects " + std::to_string(model.dim_x()));
    }
    if (model.def().in_support) {
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            if (!model.def().in_support(data.observations().row(i).transpose())) {
                throw DomainError("row " + std::to_string(i) + " is outside the support of " +
                                  model.name());
            }
        }
    }
    FitResult out;
    out.target = weighted_stat_mean(model, data);
    const InverseResult inv = inverse_mean_map(model, out.target, std::nullopt, options.solver);
    out.eta_hat = inv.eta;
    out.theta_hat = model.nat_param_inverse(inv.eta);

    auto& diag = out.diagnostics;
    diag.iterations = inv.iterations;
    diag.residual = inv.residual;
    diag.path = inv.path_used;
    diag.used_bisection = inv.used_bisection;
    const Matrix hess = hessian_log_weighted_likelihood(model, data, inv.eta);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hess, Eigen::EigenvaluesOnly);
    diag.hessian_min_eigenvalue = es.eigenvalues()[0];
    diag.hessian_max_eigenvalue = es.eigenvalues()[es.eigenvalues().size() - 1];
    diag.minimality = classify_covariance(stat_covariance(model, inv.eta), options.minimality_rel_tol);
    if (!diag.minimality.minimal) {
        diag.warnings.push_back("degenerate Hessian at the estimate: maximum is not unique");
    }
    if (!out.theta_hat.allFinite()) throw NumericError("estimate is not finite");
    return out;
}

FitResult fit(const FamilyModel& model, const Matrix& observations, const WeightPolicy& policy,
              const FitOptions& options) {
    if (!model.def().nat_param_bijective) {
        throw ConfigError("model " + model.name() + " declares a non-bijective parameterization");
    }
    if (observations.cols() != model.dim_x()) {
        throw DomainError("data has " + std::to_string(observations.cols()) + " columns, model " +
                          model.name() + " expects " + std::to_string(model.dim_x()));
    }
    const Matrix log_u = log_policy_weights(policy, observations);
    if (policy.kind != PolicyKind::lehmer) {
        return fit_weighted(model, WeightedDataset(observations, normalized_weights(log_u.col(0))),
                            options);
    }

    if (!model.separable() || !model.def().marginal || model.dim_x() != model.dim_eta()) {
        throw ConfigError("lehmer policy needs a model with independent components");
    }
    const Eigen::Index q = model.dim_eta();
    FitResult out;
    out.theta_hat.resize(q);
    out.eta_hat.resize(q);
    out.target.value.resize(q);
    auto& diag = out.diagnostics;
    diag.hessian_min_eigenvalue = std::numeric_limits<double>::infinity();
    diag.hessian_max_eigenvalue = -std::numeric_limits<double>::infinity();
    Vector variances(q);
    for (Eigen::Index j = 0; j < q; ++j) {
        const FamilyModel component = model.def().marginal(j);
        const WeightedDataset column(observations.col(j), normalized_weights(log_u.col(j)));
        const FitResult r = fit_weighted(component, column, options);
        out.theta_hat[j] = r.theta_hat[0];
        out.eta_hat[j] = r.eta_hat[0];
        out.target.value[j] = r.target.value[0];
        diag.iterations = std::max(diag.iterations, r.diagnostics.iterations);
        diag.residual = std::max(diag.residual, r.diagnostics.residual);
        diag.hessian_min_eigenvalue = std::min(diag.hessian_min_eigenvalue, r.diagnostics.hessian_min_eigenvalue);
        diag.hessian_max_eigenvalue = std::max(diag.hessian_max_eigenvalue, r.diagnostics.hessian_max_eigenvalue);
        diag.path = r.diagnostics.path;
        diag.used_bisection = diag.used_bisection || r.diagnostics.used_bisection;
        variances[j] = r.diagnostics.minimality.largest_eigenvalue;
        append_prefixed(diag.warnings, r.diagnostics.warnings, "component " + std::to_string(j) + ": ");
    }
    // Independent components: the joint covariance is diagonal.
    diag.minimality = classify_covariance(variances.asDiagonal().toDenseMatrix(), options.minimality_rel_tol);
    return out;
}

SubclassReport subclass_form(const FamilyModel& model, const WeightPolicy& policy,
                             const std::optional<Matrix>& observations) {
    SubclassReport rep;
    const auto& def = model.def();
    if (policy.kind == PolicyKind::custom) {
        rep.reason = "custom weight policy matches neither mean family";
        return rep;
    }
    if (!def.power_exponents) {
        rep.reason = "sufficient statistic is not a per-component power of x";
        return rep;
    }
    const auto& pw = *def.power_exponents;
    const bool all_identity = std::all_of(pw.begin(), pw.end(), [](double e) { return e == 1.0; });
    auto support_nonneg = [&](std::size_t j) {
        return def.support_lower.size() > j && def.support_lower[j] >= 0.0;
    };
    if (observations) {
        try {
            (void)log_policy_weights(policy, *observations);
        } catch (const Error& e) {
            rep.reason = std::string("policy is invalid on the data: ") + e.what();
            return rep;
        }
    }

    if (policy.kind == PolicyKind::holder) {
        for (std::size_t j = 0; j < pw.size(); ++j) {
            if (pw[j] == 0.0) {
                rep.reason = "T_j = x_j^0 is constant";
                return rep;
            }
            if (pw[j] != 1.0 && !support_nonneg(j)) {
                rep.reason = "power statistic of order != 1 on a support containing negatives";
                return rep;
            }
        }
        rep.is_holder_mean = true;
        rep.reason = "T_j(x) = x_j^{a_j} with u = w: theta_hat is the w-weighted Hölder mean of order a_j per component";
        return rep;
    }

    // lehmer
    if (!all_identity) {
        rep.reason = "lehmer form needs T to be the identity in every component";
        return rep;
    }
    if (!def.separable || def.dim_x != def.dim_eta) {
        rep.reason = "lehmer form needs independent components";
        return rep;
    }
    for (Eigen::Index j = 0; j < def.dim_eta; ++j) {
        double alpha = 0.0;
        try {
            alpha = lehmer_exponent(policy, j, def.dim_eta);
        } catch (const Error& e) {
            rep.reason = e.what();
            return rep;
        }
        if (alpha != 1.0 && !support_nonneg(static_cast<std::size_t>(j))) {
            rep.reason = "u = w x^(a-1) is not positive on a support containing non-positive values";
            return rep;
        }
    }
    rep.is_lehmer_mean = true;
    rep.reason = "T = identity, independent components, u = w x^{a_j - 1}: theta_hat is the Lehmer mean of order a_j per component";
    return rep;
}

}  // namespace mwmean
