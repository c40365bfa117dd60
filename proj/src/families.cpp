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
#include "mwmean/families.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mwmean/error.hpp"
#include "mwmean/numeric.hpp"

namespace mwmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sum_to_one_check(std::vector<double> p) {
    if (p.empty()) throw ConfigError("multinomial needs at least one category");
    CompensatedSum s;
    for (double v : p) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("multinomial probabilities must be positive");
        s += v;
    }
    if (std::abs(s.value() - 1.0) > 1e-12) throw ConfigError("multinomial probabilities must sum to 1");
    return p;
}

double log_multinomial_coefficient(double trials, const Vector& x) {
    double s = std::lgamma(trials + 1.0);
    for (double c : x) s -= std::lgamma(c + 1.0);
    return s;
}

Matrix multinomial_covariance(const Vector& pi, double trials) {
    Matrix k = -trials * pi * pi.transpose();
    k.diagonal() += trials * pi;
    return k;
}

}  // namespace

double sample_weibull(double lambda, double k, std::mt19937_64& rng) {
    // U in (0, 1]; -ln U is then finite.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = 1.0 - unif(rng);
    return lambda * std::pow(-std::log(u), 1.0 / k);
}

FamilyModel weibull_model(const WeibullSpec& spec) {
    const std::vector<double> k = spec.shapes;
    if (k.empty()) throw ConfigError("weibull model needs at least one component");
    for (double s : k) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw ConfigError("weibull shape must be a finite positive real");
        }
    }
    const auto q = static_cast<Eigen::Index>(k.size());

    FamilyDefinition d;
    d.name = "weibull";
    d.dim_x = q;
    d.dim_eta = q;
    d.log_base_measure = [k](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            s += std::log(k[j]);
            if (k[j] != 1.0) s += (k[j] - 1.0) * std::log(x[j]);
        }
        return s;
    };
    d.in_support = [](const Vector& x) { return (x.array() >= 0.0).all(); };
    d.sufficient_stat = [k](const Vector& x) {
        Vector t(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) t[j] = std::pow(x[j], k[j]);
        return t;
    };
    d.nat_param = [k](const Vector& lambda) {
        if (!(lambda.array() > 0.0).all()) throw DomainError("weibull scales must be positive");
        Vector eta(lambda.size());
        for (Eigen::Index j = 0; j < lambda.size(); ++j) eta[j] = -std::pow(lambda[j], -k[j]);
        return eta;
    };
    d.nat_param_inverse = [k](const Vector& eta) {
        Vector lambda(eta.size());
        for (Eigen::Index j = 0; j < eta.size(); ++j) lambda[j] = std::pow(-eta[j], -1.0 / k[j]);
        return lambda;
    };
    d.log_normalizer = [](const Vector& eta) { return -(-eta.array()).log().sum(); };
    d.natural_domain = [](const Vector& eta) { return (eta.array() < 0.0).all(); };
    d.interior_eta = -Vector::Ones(q);
    d.mean_map = [](const Vector& eta) -> Vector { return -eta.cwiseInverse(); };
    d.mean_map_inverse = [](const Vector& t) -> Vector { return -t.cwiseInverse(); };
    d.stat_covariance = [](const Vector& eta) -> Matrix {
        return eta.cwiseProduct(eta).cwiseInverse().asDiagonal();
    };
    d.attainable_target = [](const Vector& t) { return (t.array() > 0.0).all(); };
    d.attainable_description = "every component of the target must lie in (0, +inf)";
    d.separable = true;
    d.component_domain.assign(k.size(), {-kInf, 0.0});
    d.marginal = [k](Eigen::Index j) { return weibull_model({{k[static_cast<std::size_t>(j)]}}); };
    d.power_exponents = k;
    d.support_lower.assign(k.size(), 0.0);
    d.sampler = [k](const Vector& eta, std::mt19937_64& rng) {
        Vector x(eta.size());
        for (Eigen::Index j = 0; j < eta.size(); ++j) {
            const double lambda = std::pow(-eta[j], -1.0 / k[j]);
            x[j] = sample_weibull(lambda, k[j], rng);
        }
        return x;
    };
    return FamilyModel(std::move(d));
}

double weibull_moment(double lambda, double k, double t) {
    if (!(lambda > 0.0) || !(k > 0.0) || !(t >= 0.0)) {
        throw DomainError("weibull moment needs lambda > 0, k > 0, t >= 0");
    }
    return std::pow(lambda, t) * std::tgamma(1.0 + t / k);
}

FamilyModel gaussian_known_variance_model(const std::vector<double>& sigmas) {
    if (sigmas.empty()) throw ConfigError("gaussian model needs at least one component");
    for (double s : sigmas) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("gaussian sigma must be positive");
    }
    const auto q = static_cast<Eigen::Index>(sigmas.size());
    Vector var(q);
    for (Eigen::Index j = 0; j < q; ++j) var[j] = sigmas[j] * sigmas[j];

    FamilyDefinition d;
    d.name = "gaussian";
    d.dim_x = q;
    d.dim_eta = q;
    d.log_base_measure = [var](const Vector& x) {
        constexpr double log_two_pi = 1.8378770664093454836;
        return (-0.5 * x.array().square() / var.array() - 0.5 * (log_two_pi + var.array().log()))
            .sum();
    };
    d.sufficient_stat = [](const Vector& x) { return x; };
    d.nat_param = [var](const Vector& mu) -> Vector { return mu.cwiseQuotient(var); };
    d.nat_param_inverse = [var](const Vector& eta) -> Vector { return eta.cwiseProduct(var); };
    d.log_normalizer = [var](const Vector& eta) {
        return 0.5 * (var.array() * eta.array().square()).sum();
    };
    d.natural_domain = [](const Vector&) { return true; };
    d.interior_eta = Vector::Zero(q);
    d.mean_map = [var](const Vector& eta) -> Vector { return eta.cwiseProduct(var); };
    d.mean_map_inverse = [var](const Vector& t) -> Vector { return t.cwiseQuotient(var); };
    d.stat_covariance = [var](const Vector&) -> Matrix { return var.asDiagonal(); };
    d.attainable_description = "any finite target";
    d.separable = true;
    d.component_domain.assign(sigmas.size(), {-kInf, kInf});
    d.marginal = [sigmas](Eigen::Index j) {
        return gaussian_known_variance_model({sigmas[static_cast<std::size_t>(j)]});
    };
    d.power_exponents = std::vector<double>(sigmas.size(), 1.0);
    d.support_lower.assign(sigmas.size(), -kInf);
    d.sampler = [var](const Vector& eta, std::mt19937_64& rng) {
        Vector x(eta.size());
        for (Eigen::Index j = 0; j < eta.size(); ++j) {
            std::normal_distribution<double> nd(var[j] * eta[j], std::sqrt(var[j]));
            x[j] = nd(rng);
        }
        return x;
    };
    return FamilyModel(std::move(d));
}

MultinomialFixture::MultinomialFixture(int trials, std::vector<double> probabilities)
    : trials_(trials), p_(sum_to_one_check(std::move(probabilities))) {
    if (trials_ < 1) throw ConfigError("multinomial needs at least one trial");
}

Matrix MultinomialFixture::sample(std::size_t n, std::mt19937_64& rng) const {
    const auto k = static_cast<Eigen::Index>(p_.size());
    Matrix out(static_cast<Eigen::Index>(n), k);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        // Sequential conditional binomials.
        int left = trials_;
        double mass = 1.0;
        for (Eigen::Index j = 0; j + 1 < k; ++j) {
            const double pj = std::min(1.0, p_[j] / mass);
            std::binomial_distribution<int> bin(left, pj);
            const int c = left > 0 ? bin(rng) : 0;
            out(i, j) = c;
            left -= c;
            mass -= p_[j];
        }
        out(i, k - 1) = left;
    }
    return out;
}

FamilyModel MultinomialFixture::full_model() const {
    const auto k = static_cast<Eigen::Index>(p_.size());
    const double n = trials_;
    FamilyDefinition d;
    d.name = "multinomial-full";
    d.dim_x = k;
    d.dim_eta = k;
    d.log_base_measure = [n](const Vector& x) {
        return log_multinomial_coefficient(n, x);
    };
    d.sufficient_stat = [](const Vector& x) { return x; };
    d.nat_param = [](const Vector& p) -> Vector { return p.array().log(); };
    d.nat_param_inverse = [](const Vector& eta) -> Vector {
        const std::vector<double> e(eta.data(), eta.data() + eta.size());
        return (eta.array() - log_sum_exp(e)).exp();
    };
    d.nat_param_bijective = false;
    d.log_normalizer = [n](const Vector& eta) {
        const std::vector<double> e(eta.data(), eta.data() + eta.size());
        return n * log_sum_exp(e);
    };
    d.natural_domain = [](const Vector&) { return true; };
    d.interior_eta = Vector::Zero(k);
    d.mean_map = [n](const Vector& eta) -> Vector {
        const std::vector<double> e(eta.data(), eta.data() + eta.size());
        return n * (eta.array() - log_sum_exp(e)).exp().matrix();
    };
    d.stat_covariance = [n](const Vector& eta) {
        const std::vector<double> e(eta.data(), eta.data() + eta.size());
        const Vector pi = (eta.array() - log_sum_exp(e)).exp();
        return multinomial_covariance(pi, n);
    };
    d.attainable_target = [n](const Vector& t) {
        return (t.array() > 0.0).all() && std::abs(t.sum() - n) <= 1e-9 * n;
    };
    d.attainable_description = "targets with positive entries summing to N (solution not unique)";
    d.power_exponents = std::vector<double>(p_.size(), 1.0);
    d.support_lower.assign(p_.size(), 0.0);
    const MultinomialFixture self = *this;
    d.sampler = [self](const Vector&, std::mt19937_64& rng) -> Vector {
        return self.sample(1, rng).row(0).transpose();
    };
    return FamilyModel(std::move(d));
}

Vector MultinomialFixture::full_eta() const {
    Vector eta(static_cast<Eigen::Index>(p_.size()));
    for (std::size_t j = 0; j < p_.size(); ++j) eta[static_cast<Eigen::Index>(j)] = std::log(p_[j]);
    return eta;
}

FamilyModel MultinomialFixture::reduced_model() const {
    if (p_.size() < 2) throw ConfigError("reduced multinomial needs at least two categories");
    const auto k = static_cast<Eigen::Index>(p_.size());
    const Eigen::Index q = k - 1;
    const double n = trials_;
    auto probs = [](const Vector& eta) -> Vector {
        std::vector<double> e(eta.data(), eta.data() + eta.size());
        e.push_back(0.0);
        return (eta.array() - log_sum_exp(e)).exp();
    };
    FamilyDefinition d;
    d.name = "multinomial-reduced";
    d.dim_x = k;
    d.dim_eta = q;
    d.log_base_measure = [n](const Vector& x) {
        return log_multinomial_coefficient(n, x);
    };
    d.sufficient_stat = [q](const Vector& x) -> Vector { return x.head(q); };
    d.nat_param = [](const Vector& p) -> Vector {
        return (p.array() / (1.0 - p.sum())).log();
    };
    d.nat_param_inverse = probs;
    d.log_normalizer = [n](const Vector& eta) {
        std::vector<double> e(eta.data(), eta.data() + eta.size());
        e.push_back(0.0);
        return n * log_sum_exp(e);
    };
    d.natural_domain = [](const Vector&) { return true; };
    d.interior_eta = Vector::Zero(q);
    d.mean_map = [n, probs](const Vector& eta) -> Vector { return n * probs(eta); };
    d.mean_map_inverse = [n](const Vector& t) -> Vector {
        return (t.array() / (n - t.sum())).log();
    };
    d.stat_covariance = [n, probs](const Vector& eta) { return multinomial_covariance(probs(eta), n); };
    d.attainable_target = [n](const Vector& t) {
        return (t.array() > 0.0).all() && t.sum() < n;
    };
    d.attainable_description = "positive targets with sum < N";
    d.support_lower.assign(p_.size(), 0.0);
    const MultinomialFixture self = *this;
    d.sampler = [self](const Vector&, std::mt19937_64& rng) -> Vector {
        return self.sample(1, rng).row(0).transpose();
    };
    return FamilyModel(std::move(d));
}

Vector MultinomialFixture::reduced_eta() const {
    const auto q = static_cast<Eigen::Index>(p_.size()) - 1;
    Vector eta(q);
    for (Eigen::Index j = 0; j < q; ++j) eta[j] = std::log(p_[j] / p_.back());
    return eta;
}

}  // namespace mwmean
