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

#include <cstdint>
#include <random>
#include <vector>

#include "mwmean/expfam.hpp"

namespace mwmean {

// Independent-component Weibull with fixed shapes k_j; the scales lambda_j
// are the parameters being estimated.
struct WeibullSpec {
    std::vector<double> shapes;
};

// T_j(x) = x_j^{k_j}, eta_j = -lambda_j^{-k_j}, H(eta) = -sum ln(-eta_j),
// log a(x) = sum ln k_j + (k_j - 1) ln x_j. Natural domain: eta_j < 0.
// r_j(eta) = -1/eta_j = lambda_j^{k_j}. Shape 1 is the exponential family.
FamilyModel weibull_model(const WeibullSpec& spec);

// E[X^t] = lambda^t Gamma(1 + t/k) for X ~ Weibull(lambda, k).
double weibull_moment(double lambda, double k, double t);

// Inverse-CDF draw lambda (-ln U)^{1/k}.
double sample_weibull(double lambda, double k, std::mt19937_64& rng);

// Independent Gaussians with known standard deviations; mu is estimated.
// T(x) = x, eta = mu / sigma^2, H = sum sigma^2 eta^2 / 2.
FamilyModel gaussian_known_variance_model(const std::vector<double>& sigmas);

// Multinomial(N, p) with k categories. The full statistic T(x) = x is
// redundant because sum_j x_j = N; dropping the last count gives a minimal
// family.
class MultinomialFixture {
   public:
    MultinomialFixture(int trials, std::vector<double> probabilities);

    int trials() const { return trials_; }
    std::size_t categories() const { return p_.size(); }

    // n draws, one count vector per row.
    Matrix sample(std::size_t n, std::mt19937_64& rng) const;

    // T(x) = x in R^k, eta = ln p, H(eta) = N ln sum exp(eta_j). Declared
    // non-bijective: eta and eta + c(1,...,1) give the same distribution.
    FamilyModel full_model() const;
    Vector full_eta() const;

    // T(x) = (x_1..x_{k-1}), eta_j = ln(p_j / p_k), H = N ln(1 + sum exp eta_j).
    // Requires k >= 2.
    FamilyModel reduced_model() const;
    Vector reduced_eta() const;

   private:
    int trials_;
    std::vector<double> p_;
};

}  // namespace mwmean
