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

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mwmean {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class FamilyModel;

// Density a(x) exp(<eta, T(x)> - H(eta)) of a minimal exponential family.
// Everything the generic routines need is supplied as callables; optional
// closed forms short-circuit the numeric fallbacks.
struct FamilyDefinition {
    std::string name;
    Eigen::Index dim_x = 0;    // k
    Eigen::Index dim_eta = 0;  // q, must satisfy q <= k

    std::function<double(const Vector& x)> log_base_measure;
    std::function<Vector(const Vector& x)> sufficient_stat;
    // Optional support predicate on x; absent means all of R^k.
    std::function<bool(const Vector& x)> in_support;

    // theta -> eta and back; the estimator reports theta = nat_param_inverse(eta).
    std::function<Vector(const Vector& theta)> nat_param;
    std::function<Vector(const Vector& eta)> nat_param_inverse;
    bool nat_param_bijective = true;

    std::function<double(const Vector& eta)> log_normalizer;
    std::function<bool(const Vector& eta)> natural_domain;
    Vector interior_eta;  // any point of the natural domain

    // Closed forms; each falls back to finite differences when empty.
    std::function<Vector(const Vector& eta)> mean_map;
    std::function<Vector(const Vector& target)> mean_map_inverse;
    std::function<Matrix(const Vector& eta)> stat_covariance;

    // Interior of the convex hull of T's range, i.e. the image of the mean map.
    std::function<bool(const Vector& target)> attainable_target;
    std::string attainable_description;

    // Optional Newton starting point derived from the target.
    std::function<Vector(const Vector& target)> initial_eta;

    // Separable models: eta_j only affects r_j. component_domain holds the
    // open interval of each eta_j; marginal(j) is the univariate family of
    // component j, observed through column j of the data.
    bool separable = false;
    std::vector<std::pair<double, double>> component_domain;
    std::function<FamilyModel(Eigen::Index j)> marginal;

    // Structural description used to recognize mean-family subclasses:
    // T_j(x) = x_j^{power_exponents[j]} when set. support_lower[j] is the
    // infimum of the support of x_j (-inf when unbounded).
    std::optional<std::vector<double>> power_exponents;
    std::vector<double> support_lower;

    std::function<Vector(const Vector& eta, std::mt19937_64& rng)> sampler;
};

class FamilyModel {
   public:
    // Validates the definition; throws ConfigError on inconsistencies.
    explicit FamilyModel(FamilyDefinition def);

    const FamilyDefinition& def() const { return def_; }
    const std::string& name() const { return def_.name; }
    Eigen::Index dim_x() const { return def_.dim_x; }
    Eigen::Index dim_eta() const { return def_.dim_eta; }
    bool separable() const { return def_.separable; }

    bool in_domain(const Vector& eta) const;
    Vector stat(const Vector& x) const;
    double log_normalizer(const Vector& eta) const;
    Vector nat_param(const Vector& theta) const { return def_.nat_param(theta); }
    Vector nat_param_inverse(const Vector& eta) const { return def_.nat_param_inverse(eta); }

   private:
    FamilyDefinition def_;
};

// n x k observations with strictly positive weights u(x_i).
class WeightedDataset {
   public:
    WeightedDataset(Matrix observations, Vector weights);

    static WeightedDataset unweighted(Matrix observations);

    const Matrix& observations() const { return observations_; }
    const Vector& weights() const { return weights_; }
    Eigen::Index size() const { return observations_.rows(); }
    Eigen::Index dim() const { return observations_.cols(); }
    double total_weight() const;

    // Lossless text form: header "n,k", then one line per row with the k
    // observations followed by the weight, all in shortest round-trip form.
    std::string serialize() const;
    static WeightedDataset deserialize(const std::string& text);

   private:
    Matrix observations_;
    Vector weights_;
};

// Expected sufficient statistic, the right-hand side of the critical-point
// equation r(eta) = target.
struct MomentTarget {
    Vector value;
};

double log_pdf(const FamilyModel& model, const Vector& x, const Vector& eta);

double log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                               const Vector& eta);

Vector grad_log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                                    const Vector& eta);

// -(sum u) Cov_eta[T(X)]; symmetric and negative semi-definite.
Matrix hessian_log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                                       const Vector& eta);

// r(eta) = grad H(eta) = E_eta[T(X)].
MomentTarget mean_map(const FamilyModel& model, const Vector& eta);

// Cov_eta[T(X)] = Hessian of H.
Matrix stat_covariance(const FamilyModel& model, const Vector& eta);

enum class SolverPath { automatic, closed_form, newton };

struct SolverOptions {
    SolverPath path = SolverPath::automatic;
    int max_iterations = 200;
    int max_halvings = 50;
    double tolerance = 1e-10;  // on |r(eta) - t|_inf / (1 + |t|_inf)
};

struct InverseResult {
    Vector eta;
    int iterations = 0;
    double residual = 0.0;  // |r(eta) - target|_inf
    SolverPath path_used = SolverPath::closed_form;
    bool used_bisection = false;
};

// Solves r(eta) = target. Throws NoSolutionError when the target is outside
// the attainable set and ConvergenceError when the numeric path stalls.
InverseResult inverse_mean_map(const FamilyModel& model, const MomentTarget& target,
                               const std::optional<Vector>& init = std::nullopt,
                               const SolverOptions& options = {});

struct MinimalityVerdict {
    bool minimal = true;
    Vector direction;  // unit eigenvector of the smallest eigenvalue when degenerate
    double smallest_eigenvalue = 0.0;
    double largest_eigenvalue = 0.0;
};

// Estimates Cov[T(X)] from draws of the model at eta and declares the family
// degenerate when the smallest eigenvalue is <= rel_tol * largest.
MinimalityVerdict check_minimality(const FamilyModel& model, const Vector& eta,
                                   std::size_t n_samples, std::uint64_t seed,
                                   double rel_tol = 1e-8);

// Same test on a caller-supplied representative sample (rows are x).
MinimalityVerdict check_minimality(const FamilyModel& model, const Matrix& xs,
                                   double rel_tol = 1e-8);

// Eigen-analysis of a covariance matrix shared by the two overloads above
// and by the estimator's diagnostics.
MinimalityVerdict classify_covariance(const Matrix& covariance, double rel_tol = 1e-8);

}  // namespace mwmean
