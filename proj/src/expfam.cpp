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
#include "mwmean/expfam.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwmean/error.hpp"
#include "mwmean/numeric.hpp"

namespace mwmean {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shortest(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

void require_domain(const FamilyModel& model, const Vector& eta) {
    if (eta.size() != model.dim_eta()) {
        throw DomainError("eta has dimension " + std::to_string(eta.size()) + ", model " +
                          model.name() + " expects " + std::to_string(model.dim_eta()));
    }
    if (!model.in_domain(eta)) {
        throw DomainError("eta outside the natural domain of " + model.name());
    }
}

// Central-difference step along e_j, shrunk until both probes stay inside
// the natural domain.
double probe_step(const FamilyModel& model, const Vector& eta, Eigen::Index j, double base) {
    double h = base * (1.0 + std::abs(eta[j]));
    for (int i = 0; i < 60; ++i) {
        Vector lo = eta, hi = eta;
        lo[j] -= h;
        hi[j] += h;
        if (model.in_domain(lo) && model.in_domain(hi)) return h;
        h *= 0.5;
    }
    throw NumericError("cannot place a finite-difference stencil inside the natural domain");
}

Vector numeric_mean_map(const FamilyModel& model, const Vector& eta) {
    const double base = std::cbrt(kEps);
    Vector r(eta.size());
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
        const double h = probe_step(model, eta, j, base);
        Vector lo = eta, hi = eta;
        lo[j] -= h;
        hi[j] += h;
        r[j] = (model.log_normalizer(hi) - model.log_normalizer(lo)) / (2.0 * h);
    }
    return r;
}

Matrix numeric_covariance(const FamilyModel& model, const Vector& eta) {
    const Eigen::Index q = eta.size();
    Matrix k(q, q);
    if (model.def().mean_map) {
        // Jacobian of the closed-form mean map.
        const double base = std::cbrt(kEps);
        for (Eigen::Index j = 0; j < q; ++j) {
            const double h = probe_step(model, eta, j, base);
            Vector lo = eta, hi = eta;
            lo[j] -= h;
            hi[j] += h;
            k.col(j) = (model.def().mean_map(hi) - model.def().mean_map(lo)) / (2.0 * h);
        }
    } else {
        // Second differences of H.
        const double base = std::pow(kEps, 0.25);
        std::vector<double> steps(static_cast<std::size_t>(q));
        for (Eigen::Index j = 0; j < q; ++j) steps[j] = probe_step(model, eta, j, base);
        const double h0 = model.log_normalizer(eta);
        for (Eigen::Index a = 0; a < q; ++a) {
            const double ha = steps[a];
            Vector p = eta, m = eta;
            p[a] += ha;
            m[a] -= ha;
            k(a, a) = (model.log_normalizer(p) - 2.0 * h0 + model.log_normalizer(m)) / (ha * ha);
            for (Eigen::Index b = a + 1; b < q; ++b) {
                const double hb = steps[b];
                Vector pp = eta, pm = eta, mp = eta, mm = eta;
                pp[a] += ha, pp[b] += hb;
                pm[a] += ha, pm[b] -= hb;
                mp[a] -= ha, mp[b] += hb;
                mm[a] -= ha, mm[b] -= hb;
                const double v = (model.log_normalizer(pp) - model.log_normalizer(pm) -
                                  model.log_normalizer(mp) + model.log_normalizer(mm)) /
                                 (4.0 * ha * hb);
                k(a, b) = v;
                k(b, a) = v;
            }
        }
    }
    return 0.5 * (k + k.transpose());
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Solves r_j(eta) = target_j for one component of a separable model by
// bracketing and bisection, holding the other components fixed. Stops after
// max_bisections halvings, or earlier once the residual meets tol.
double bisect_component(const FamilyModel& model, Vector eta, Eigen::Index j, double target,
                        int max_bisections, double tol, const std::string& attainable) {
    const auto [dom_lo, dom_hi] = model.def().component_domain[static_cast<std::size_t>(j)];
    auto r_at = [&](double v) {
        eta[j] = v;
        return mean_map(model, eta).value[j];
    };
    auto no_solution = [&]() {
        return NoSolutionError("moment target " + shortest(target) + " for component " +
                                   std::to_string(j) + " of " + model.name() +
                                   " is not attainable",
                               attainable);
    };

    double mid = eta[j];
    double r_mid = r_at(mid);
    if (std::abs(r_mid - target) <= tol) return mid;

    // Expand a bracket [lo, hi] with r(lo) < target < r(hi).
    double lo = mid, hi = mid;
    const bool go_up = r_mid < target;
    double step = 1.0 + std::abs(mid);
    bool bracketed = false;
    for (int i = 0; i < 400 && !bracketed; ++i) {
        double next;
        if (go_up) {
            next = std::isfinite(dom_hi) ? hi + 0.5 * (dom_hi - hi) : hi + step;
            if (!(next > hi) || next >= dom_hi) throw no_solution();
            lo = hi;
            hi = next;
            bracketed = r_at(hi) >= target;
        } else {
            next = std::isfinite(dom_lo) ? lo - 0.5 * (lo - dom_lo) : lo - step;
            if (!(next < lo) || next <= dom_lo) throw no_solution();
            hi = lo;
            lo = next;
            bracketed = r_at(lo) <= target;
        }
        step *= 2.0;
    }
    if (!bracketed) throw no_solution();

    double best = 0.5 * (lo + hi);
    for (int i = 0; i < max_bisections; ++i) {
        best = 0.5 * (lo + hi);
        if (best <= lo || best >= hi) break;
        const double r = r_at(best);
        if (std::abs(r - target) <= tol) break;
        if (r < target) {
            lo = best;
        } else {
            hi = best;
        }
    }
    return best;
}

Vector bisection_solve(const FamilyModel& model, Vector eta, const Vector& target,
                       int max_bisections, double tol) {
    for (Eigen::Index j = 0; j < eta.size(); ++j) {
        eta[j] = bisect_component(model, eta, j, target[j], max_bisections, tol,
                                  model.def().attainable_description);
    }
    return eta;
}

}  // namespace

FamilyModel::FamilyModel(FamilyDefinition def) : def_(std::move(def)) {
    const auto fail = [&](const std::string& what) {
        throw ConfigError("family '" + def_.name + "': " + what);
    };
    if (def_.dim_x < 1 || def_.dim_eta < 1) fail("dimensions must be positive");
    if (def_.dim_eta > def_.dim_x) fail("natural parameter dimension exceeds observation dimension");
    if (!def_.log_base_measure || !def_.sufficient_stat || !def_.nat_param ||
        !def_.nat_param_inverse || !def_.log_normalizer || !def_.natural_domain) {
        fail("missing required map");
    }
    if (def_.interior_eta.size() != def_.dim_eta || !def_.natural_domain(def_.interior_eta)) {
        fail("interior_eta is not a point of the natural domain");
    }
    if (def_.separable &&
        def_.component_domain.size() != static_cast<std::size_t>(def_.dim_eta)) {
        fail("separable model needs one domain interval per component");
    }
    if (def_.power_exponents && def_.power_exponents->size() != static_cast<std::size_t>(def_.dim_eta)) {
        fail("power_exponents must have one entry per sufficient statistic");
    }
    if (!def_.support_lower.empty() &&
        def_.support_lower.size() != static_cast<std::size_t>(def_.dim_x)) {
        fail("support_lower must have one entry per observation component");
    }
}

bool FamilyModel::in_domain(const Vector& eta) const {
    return eta.size() == def_.dim_eta && eta.allFinite() && def_.natural_domain(eta);
}

Vector FamilyModel::stat(const Vector& x) const {
    if (x.size() != def_.dim_x) {
        throw DomainError("observation has dimension " + std::to_string(x.size()) + ", model " +
                          def_.name + " expects " + std::to_string(def_.dim_x));
    }
    return def_.sufficient_stat(x);
}

double FamilyModel::log_normalizer(const Vector& eta) const {
    const double h = def_.log_normalizer(eta);
    if (!std::isfinite(h)) throw NumericError("log-normalizer is not finite for " + def_.name);
    return h;
}

WeightedDataset::WeightedDataset(Matrix observations, Vector weights)
    : observations_(std::move(observations)), weights_(std::move(weights)) {
    if (observations_.rows() < 1 || observations_.cols() < 1) {
        throw DomainError("weighted dataset must contain at least one observation");
    }
    if (weights_.size() != observations_.rows()) {
        throw DomainError("dataset has " + std::to_string(observations_.rows()) +
                          " rows but " + std::to_string(weights_.size()) + " weights");
    }
    if (!observations_.allFinite()) throw DomainError("dataset contains non-finite observations");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
            throw DomainError("weight at row " + std::to_string(i) + " is not strictly positive");
        }
    }
}

WeightedDataset WeightedDataset::unweighted(Matrix observations) {
    Vector w = Vector::Ones(observations.rows());
    return WeightedDataset(std::move(observations), std::move(w));
}

double WeightedDataset::total_weight() const {
    CompensatedSum s;
    for (double w : weights_) s += w;
    return s.value();
}

std::string WeightedDataset::serialize() const {
    std::ostringstream out;
    out << observations_.rows() << ',' << observations_.cols() << '\n';
    for (Eigen::Index i = 0; i < observations_.rows(); ++i) {
        for (Eigen::Index j = 0; j < observations_.cols(); ++j) {
            out << shortest(observations_(i, j)) << ',';
        }
        out << shortest(weights_[i]) << '\n';
    }
    return out.str();
}

WeightedDataset WeightedDataset::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto parse = [](std::string_view tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw DomainError("malformed number '" + std::string(tok) + "' in dataset");
        }
        return v;
    };
    auto split = [](const std::string& s) {
        std::vector<std::string_view> out;
        std::string_view sv(s);
        std::size_t start = 0;
        for (std::size_t pos; (pos = sv.find(',', start)) != std::string_view::npos; start = pos + 1) {
            out.push_back(sv.substr(start, pos - start));
        }
        out.push_back(sv.substr(start));
        return out;
    };
    if (!std::getline(in, line)) throw DomainError("empty dataset text");
    const auto head = split(line);
    if (head.size() != 2) throw DomainError("dataset header must be 'n,k'");
    const auto n = static_cast<Eigen::Index>(parse(head[0]));
    const auto k = static_cast<Eigen::Index>(parse(head[1]));
    Matrix obs(n, k);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw DomainError("dataset text is truncated");
        const auto toks = split(line);
        if (static_cast<Eigen::Index>(toks.size()) != k + 1) {
            throw DomainError("dataset row " + std::to_string(i) + " has wrong field count");
        }
        for (Eigen::Index j = 0; j < k; ++j) obs(i, j) = parse(toks[static_cast<std::size_t>(j)]);
        w[i] = parse(toks.back());
    }
    return WeightedDataset(std::move(obs), std::move(w));
}

double log_pdf(const FamilyModel& model, const Vector& x, const Vector& eta) {
    require_domain(model, eta);
    if (model.def().in_support && !model.def().in_support(x)) {
        throw DomainError("observation outside the support of " + model.name());
    }
    return model.def().log_base_measure(x) + eta.dot(model.stat(x)) - model.log_normalizer(eta);
}

double log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                               const Vector& eta) {
    require_domain(model, eta);
    const double h = model.log_normalizer(eta);
    CompensatedSum s;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Vector x = data.observations().row(i).transpose();
        s += data.weights()[i] * (model.def().log_base_measure(x) + eta.dot(model.stat(x)) - h);
    }
    return s.value();
}

Vector grad_log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                                    const Vector& eta) {
    require_domain(model, eta);
    const Eigen::Index q = model.dim_eta();
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(q));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Vector t = model.stat(data.observations().row(i).transpose());
        for (Eigen::Index j = 0; j < q; ++j) acc[j] += data.weights()[i] * t[j];
    }
    const double total = data.total_weight();
    const Vector r = mean_map(model, eta).value;
    Vector g(q);
    for (Eigen::Index j = 0; j < q; ++j) g[j] = acc[j].value() - total * r[j];
    return g;
}

Matrix hessian_log_weighted_likelihood(const FamilyModel& model, const WeightedDataset& data,
                                       const Vector& eta) {
    return -data.total_weight() * stat_covariance(model, eta);
}

MomentTarget mean_map(const FamilyModel& model, const Vector& eta) {
    require_domain(model, eta);
    Vector r = model.def().mean_map ? model.def().mean_map(eta) : numeric_mean_map(model, eta);
    if (!r.allFinite()) throw NumericError("mean map is not finite for " + model.name());
    return {std::move(r)};
}

Matrix stat_covariance(const FamilyModel& model, const Vector& eta) {
    require_domain(model, eta);
    Matrix k = model.def().stat_covariance ? model.def().stat_covariance(eta)
                                           : numeric_covariance(model, eta);
    if (!k.allFinite()) throw NumericError("covariance of T is not finite for " + model.name());
    return 0.5 * (k + k.transpose());
}

InverseResult inverse_mean_map(const FamilyModel& model, const MomentTarget& target,
                               const std::optional<Vector>& init, const SolverOptions& options) {
    const Vector& t = target.value;
    const Eigen::Index q = model.dim_eta();
    if (t.size() != q) {
        throw DomainError("moment target has dimension " + std::to_string(t.size()) +
                          ", model expects " + std::to_string(q));
    }
    if (!t.allFinite()) throw DomainError("moment target has non-finite entries");
    const auto& def = model.def();
    if (def.attainable_target && !def.attainable_target(t)) {
        throw NoSolutionError("moment target is not attainable by " + model.name(),
                              def.attainable_description);
    }
    const double tol = options.tolerance * (1.0 + inf_norm(t));
    auto residual_of = [&](const Vector& eta) -> Vector { return mean_map(model, eta).value - t; };

    InverseResult result;
    SolverPath path = options.path;
    if (path == SolverPath::automatic) {
        path = def.mean_map_inverse ? SolverPath::closed_form : SolverPath::newton;
    }
    if (path == SolverPath::closed_form) {
        if (!def.mean_map_inverse) {
            throw ConfigError("model " + model.name() + " has no closed-form inverse mean map");
        }
        result.eta = def.mean_map_inverse(t);
        if (!model.in_domain(result.eta)) {
            throw NoSolutionError("closed-form inverse left the natural domain",
                                  def.attainable_description);
        }
        result.residual = inf_norm(residual_of(result.eta));
        result.path_used = SolverPath::closed_form;
        return result;
    }

    result.path_used = SolverPath::newton;
    Vector eta;
    if (init && model.in_domain(*init)) {
        eta = *init;
    } else if (def.initial_eta && model.in_domain(def.initial_eta(t))) {
        eta = def.initial_eta(t);
    } else if (def.separable) {
        eta = bisection_solve(model, def.interior_eta, t, 8, tol);
    } else {
        eta = def.interior_eta;
    }

    // Line-search merit: the concave objective <eta, t> - H(eta), whose
    // gradient is -g. Far from the solution the residual norm alone can be
    // lowered by walking into a flat region of r, so the objective comes
    // first; the residual test takes over once objective changes drop below
    // rounding.
    auto objective = [&](const Vector& eta_) {
        try {
            return eta_.dot(t) - model.log_normalizer(eta_);
        } catch (const NumericError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    Vector g = residual_of(eta);
    double res = inf_norm(g);
    bool converged = res <= tol;
    int iter = 0;
    for (; iter < options.max_iterations && !converged; ++iter) {
        const Matrix jac = stat_covariance(model, eta);
        const Vector step = jac.colPivHouseholderQr().solve(-g);
        if (!step.allFinite()) break;
        const double slope = -g.dot(step);  // directional derivative of the objective
        const double phi = objective(eta);
        const double g_norm = g.norm();
        bool accepted = false;
        for (int pass = 0; pass < 2 && !accepted; ++pass) {
            double scale = 1.0;
            for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
                const Vector cand = eta + scale * step;
                if (!model.in_domain(cand)) continue;
                bool ok = false;
                if (pass == 0) {
                    const double phi_cand = objective(cand);
                    ok = slope > 0.0 && std::isfinite(phi_cand) && phi_cand >= phi + 1e-4 * scale * slope &&
                         phi_cand > phi;
                    if (!ok) continue;
                }
                const Vector g_cand = residual_of(cand);
                if (pass == 1) ok = g_cand.norm() <= (1.0 - 1e-4 * scale) * g_norm;
                if (ok) {
                    eta = cand;
                    g = g_cand;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) break;
        res = inf_norm(g);
        converged = res <= tol;
    }
    if (converged) {
        // One undamped polishing step; kept only if it lowers the residual.
        const Vector step = stat_covariance(model, eta).colPivHouseholderQr().solve(-g);
        const Vector cand = eta + step;
        if (step.allFinite() && model.in_domain(cand)) {
            const double cand_res = inf_norm(residual_of(cand));
            if (cand_res < res) {
                eta = cand;
                res = cand_res;
            }
        }
    }
    if (!converged && def.separable) {
        eta = bisection_solve(model, eta, t, 2000, tol);
        res = inf_norm(residual_of(eta));
        converged = res <= tol;
        result.used_bisection = true;
    }
    if (!converged) {
        throw ConvergenceError("inverse mean map did not converge for " + model.name() +
                                   " (residual " + shortest(res) + ")",
                               std::vector<double>(eta.data(), eta.data() + eta.size()), res);
    }
    result.eta = std::move(eta);
    result.iterations = iter;
    result.residual = res;
    return result;
}

MinimalityVerdict classify_covariance(const Matrix& covariance, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (covariance + covariance.transpose()));
    if (es.info() != Eigen::Success) throw NumericError("eigen-decomposition failed");
    MinimalityVerdict v;
    const Vector& ev = es.eigenvalues();  // ascending
    v.smallest_eigenvalue = ev[0];
    v.largest_eigenvalue = ev[ev.size() - 1];
    if (v.smallest_eigenvalue <= rel_tol * std::max(v.largest_eigenvalue, 0.0)) {
        v.minimal = false;
        Vector dir = es.eigenvectors().col(0);
        Eigen::Index lead = 0;
        dir.cwiseAbs().maxCoeff(&lead);
        if (dir[lead] < 0.0) dir = -dir;
        v.direction = dir.normalized();
    }
    return v;
}

MinimalityVerdict check_minimality(const FamilyModel& model, const Matrix& xs, double rel_tol) {
    const Eigen::Index q = model.dim_eta();
    if (xs.rows() < q + 1) {
        throw DomainError("minimality check needs at least " + std::to_string(q + 1) +
                          " samples, got " + std::to_string(xs.rows()));
    }
    Matrix stats(xs.rows(), q);
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        stats.row(i) = model.stat(xs.row(i).transpose()).transpose();
    }
    const Eigen::RowVectorXd mean = stats.colwise().mean();
    const Matrix centered = stats.rowwise() - mean;
    const Matrix cov = centered.transpose() * centered / static_cast<double>(xs.rows() - 1);
    return classify_covariance(cov, rel_tol);
}

MinimalityVerdict check_minimality(const FamilyModel& model, const Vector& eta,
                                   std::size_t n_samples, std::uint64_t seed, double rel_tol) {
    require_domain(model, eta);
    if (n_samples < static_cast<std::size_t>(model.dim_eta()) + 1) {
        throw DomainError("minimality check needs at least q+1 samples");
    }
    if (!model.def().sampler) {
        throw ConfigError("model " + model.name() + " has no sampler; pass a sample instead");
    }
    std::mt19937_64 rng(seed);
    Matrix xs(static_cast<Eigen::Index>(n_samples), model.dim_x());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        xs.row(i) = model.def().sampler(eta, rng).transpose();
    }
    return check_minimality(model, xs, rel_tol);
}

}  // namespace mwmean
