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
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <CLI11.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mwmean/error.hpp"
#include "mwmean/families.hpp"
#include "mwmean/means.hpp"
#include "mwmean/mwle.hpp"
#include "mwmean/numeric.hpp"
#include "mwmean/pipeline.hpp"
#include "mwmean/sweep.hpp"
#include "oracles.hpp"

using namespace mwmean;
using mwmean::testing::rel_err;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Context {
    std::string senate;
    std::string fixture;
    std::string fixture_config;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// Random weighted sample: n in [1, max_n], log-uniform values in [lo, hi].
struct RandomSample {
    std::vector<double> xs, ws;
};

RandomSample random_sample(std::mt19937_64& rng, int max_n, double lo, double hi, bool weighted) {
    std::uniform_int_distribution<int> len(1, max_n);
    std::uniform_real_distribution<double> lx(std::log(lo), std::log(hi)), w(0.1, 2.0);
    RandomSample s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        s.xs.push_back(std::exp(lx(rng)));
        s.ws.push_back(weighted ? w(rng) : 1.0);
    }
    return s;
}

Matrix as_column(const std::vector<double>& v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return m;
}

Verdict pythagorean() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_sample(rng, 20, 1e-3, 1.0, true);
        const Sample smp(s.xs, s.ws);
        e1 = std::max(e1, std::abs(holder_mean(MeanOrder(1.0), smp) - lehmer_mean(MeanOrder(1.0), smp) - 0.0));
        e2 = std::max(e2, std::abs(holder_mean(MeanOrder(-1.0), smp) - lehmer_mean(MeanOrder(0.0), smp)));
        const auto pair = testing::random_positive(rng, 2, 1e-3, 1.0);
        const Sample two = Sample::uniform(pair);
        e3 = std::max(e3, std::abs(holder_mean(MeanOrder(0.0), two) - lehmer_mean(MeanOrder(0.5), two)));
    }
    const double secs = seconds_since(t0);
    const double worst = std::max({e1, e2, e3});
    return {worst <= 1e-12 && secs < 5.0, "max |H1-L1| " + fmt(e1) + ", |H-1 - L0| " + fmt(e2) + ", |H0 - L0.5| " +
                                              fmt(e3) + " (limit 1e-12), " + fmt(secs) + " s (limit 5 s)"};
}

Verdict link_identity() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> alpha(-3.0, 4.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_sample(rng, 20, 1e-2, 1e2, true);
        const Sample smp(s.xs, s.ws);
        double a = alpha(rng);
        while (a == 1.0) a = alpha(rng);
        const double lhs = lehmer_mean(MeanOrder(a), smp);
        // H_a^a / H_{a-1}^{a-1}, in logs.
        const double rhs = std::exp(a * std::log(holder_mean(MeanOrder(a), smp)) -
                                    (a - 1.0) * std::log(holder_mean(MeanOrder(a - 1.0), smp)));
        worst = std::max(worst, rel_err(lhs, rhs));
    }
    return {worst <= 1e-10, "max relative error " + fmt(worst) + " over 1000 pairs (limit 1e-10)"};
}

Verdict ordering_and_bounds() {
    std::mt19937_64 rng(103);
    std::vector<double> grid;
    for (int i = 0; i < 100; ++i) grid.push_back(-3.0 + 7.0 * i / 99.0);
    int bounds = 0, order = 0, monotone = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto s = random_sample(rng, 20, 1e-2, 1e2, true);
        const Sample smp(s.xs, s.ws);
        double prev_h = -INFINITY, prev_l = -INFINITY;
        for (double a : grid) {
            const double h = holder_mean(MeanOrder(a), smp);
            const double l = lehmer_mean(MeanOrder(a), smp);
            if (h < smp.min() || h > smp.max() || l < smp.min() || l > smp.max()) ++bounds;
            if ((a > 1.0 && l < h) || (a < 1.0 && l > h)) ++order;
            if (h < prev_h || l < prev_l) ++monotone;
            prev_h = h;
            prev_l = l;
        }
    }
    return {bounds + order + monotone == 0, "violations over 1000 samples x 100 orders: bounds " +
                                                std::to_string(bounds) + ", L vs H ordering " +
                                                std::to_string(order) + ", monotonicity " + std::to_string(monotone)};
}

Verdict lehmer_as_mwle() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> beta(-2.0, 3.0);
    const auto model = weibull_model({{1.0}});
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto s = random_sample(rng, 50, 1e-2, 1e2, false);
        const double b = beta(rng);
        const double fitted = fit(model, as_column(s.xs), WeightPolicy::lehmer({b})).theta_hat[0];
        worst = std::max({worst, rel_err(fitted, lehmer_mean(MeanOrder(b), Sample::uniform(s.xs))),
                          rel_err(fitted, testing::naive_lehmer(b, s.xs, s.ws))});
    }
    return {worst <= 1e-9, "max relative error " + fmt(worst) + " over 500 columns (limit 1e-9)"};
}

Verdict holder_as_mwle() {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto s = random_sample(rng, 50, 1e-2, 1e2, false);
        const double k = 5.0 * (1.0 - unit(rng));  // (0, 5]
        const double fitted = fit(weibull_model({{k}}), as_column(s.xs), WeightPolicy::holder()).theta_hat[0];
        long double sum = 0.0L;
        for (double x : s.xs) sum += std::pow(static_cast<long double>(x), static_cast<long double>(k));
        const double expected = static_cast<double>(std::pow(sum / s.xs.size(), 1.0L / k));
        worst = std::max(worst, rel_err(fitted, expected));
    }
    return {worst <= 1e-9, "max relative error " + fmt(worst) + " over 500 columns (limit 1e-9)"};
}

Verdict generic_solver() {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> shape(0.2, 5.0), x(0.1, 3.0), sigma(0.1, 5.0), w(0.1, 2.0);
    std::normal_distribution<double> nd(0.0, 3.0);
    std::uniform_int_distribution<int> len(1, 30), dim(1, 3);
    FitOptions newton;
    newton.solver.path = SolverPath::newton;
    double worst_eta = 0.0, worst_grad = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const bool gauss = trial % 2 == 1;
        const int q = dim(rng), n = len(rng);
        std::vector<double> params;
        for (int j = 0; j < q; ++j) params.push_back(gauss ? sigma(rng) : shape(rng));
        const FamilyModel model = gauss ? gaussian_known_variance_model(params) : weibull_model({params});
        Matrix obs(n, q);
        for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = gauss ? nd(rng) : x(rng);
        Vector u(n);
        for (auto& v : u) v = w(rng);
        const WeightedDataset data(obs, u);
        const auto a = fit_weighted(model, data);
        const auto b = fit_weighted(model, data, newton);
        for (Eigen::Index j = 0; j < q; ++j) {
            worst_eta = std::max(worst_eta, std::abs(a.eta_hat[j] - b.eta_hat[j]) / std::max(std::abs(a.eta_hat[j]), 1.0));
        }
        for (const auto* f : {&a, &b}) {
            const double g = grad_log_weighted_likelihood(model, data, f->eta_hat).norm();
            worst_grad = std::max(worst_grad, g / (1.0 + data.total_weight()));
        }
    }
    return {worst_eta <= 1e-9 && worst_grad <= 1e-8,
            "newton vs closed form max difference " + fmt(worst_eta) + " (limit 1e-9), max |grad|/(1+sum u) " +
                fmt(worst_grad) + " (limit 1e-8)"};
}

Verdict calculus() {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> shape(0.3, 4.0), x(0.05, 4.0), neg(0.05, 3.0), w(0.1, 2.0);
    std::normal_distribution<double> nd(0.0, 1.5);
    std::uniform_int_distribution<int> len(2, 25), dim(1, 3);
    double worst_grad = 0.0, worst_eig = -INFINITY;
    for (int trial = 0; trial < 200; ++trial) {
        const int kind = trial % 3;
        const int q = dim(rng), n = len(rng);
        FamilyModel model = weibull_model({{1.0}});
        Matrix obs;
        Vector eta(q);
        if (kind == 0) {
            std::vector<double> ks;
            for (int j = 0; j < q; ++j) ks.push_back(shape(rng));
            model = weibull_model({ks});
            obs.resize(n, q);
            for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = x(rng);
            for (auto& e : eta) e = -neg(rng);
        } else if (kind == 1) {
            std::vector<double> sig;
            for (int j = 0; j < q; ++j) sig.push_back(0.5 + neg(rng));
            model = gaussian_known_variance_model(sig);
            obs.resize(n, q);
            for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = nd(rng);
            for (auto& e : eta) e = nd(rng);
        } else {
            std::vector<double> p(static_cast<std::size_t>(q) + 1);
            double total = 0.0;
            for (auto& v : p) total += (v = neg(rng));
            for (auto& v : p) v /= total;
            MultinomialFixture mf(8, p);
            model = mf.reduced_model();
            obs = mf.sample(static_cast<std::size_t>(n), rng);
            for (auto& e : eta) e = nd(rng);
        }
        Vector u(obs.rows());
        for (auto& v : u) v = w(rng);
        const WeightedDataset data(obs, u);
        const Vector g = grad_log_weighted_likelihood(model, data, eta);
        const Vector fd = testing::fd_gradient([&](const Vector& e) { return log_weighted_likelihood(model, data, e); }, eta,
                                               1e-6);
        worst_grad = std::max(worst_grad, (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Matrix> es(hessian_log_weighted_likelihood(model, data, eta));
        worst_eig = std::max(worst_eig, es.eigenvalues().maxCoeff());
    }
    return {worst_grad <= 1e-6 && worst_eig <= 1e-9, "max gradient relative error " + fmt(worst_grad) +
                                                         " (limit 1e-6), largest Hessian eigenvalue " + fmt(worst_eig) +
                                                         " (limit 1e-9)"};
}

Verdict uniqueness() {
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> x(0.1, 4.0), neg(0.01, 10.0);
    std::normal_distribution<double> nd(0.0, 3.0);
    SolverOptions newton;
    newton.path = SolverPath::newton;
    double worst = 0.0;
    auto multistart = [&](const FamilyModel& model, const MomentTarget& target, auto draw) {
        std::vector<Vector> sols;
        for (int s = 0; s < 10; ++s) sols.push_back(inverse_mean_map(model, target, draw(), newton).eta);
        for (std::size_t i = 0; i < sols.size(); ++i)
            for (std::size_t j = i + 1; j < sols.size(); ++j) worst = std::max(worst, (sols[i] - sols[j]).norm());
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = weibull_model({{0.5, 1.0, 2.5}});
        Matrix obs(15, 3);
        for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = x(rng);
        multistart(w, weighted_stat_mean(w, WeightedDataset::unweighted(obs)), [&] {
            Vector e(3);
            for (auto& v : e) v = -neg(rng);
            return e;
        });
        const auto g = gaussian_known_variance_model({0.7, 2.0});
        Matrix gobs(15, 2);
        for (Eigen::Index i = 0; i < gobs.size(); ++i) gobs.data()[i] = nd(rng);
        multistart(g, weighted_stat_mean(g, WeightedDataset::unweighted(gobs)), [&] {
            Vector e(2);
            for (auto& v : e) v = nd(rng);
            return e;
        });
        MultinomialFixture mf(10, {0.2, 0.3, 0.5});
        const auto red = mf.reduced_model();
        multistart(red, weighted_stat_mean(red, WeightedDataset::unweighted(mf.sample(40, rng))), [&] {
            Vector e(2);
            for (auto& v : e) v = nd(rng);
            return e;
        });
    }
    double worst_angle = 0.0;
    bool all_degenerate = true;
    for (std::size_t k : {2u, 3u, 5u}) {
        MultinomialFixture mf(10, std::vector<double>(k, 1.0 / static_cast<double>(k)));
        const auto v = check_minimality(mf.full_model(), mf.full_eta(), 2000, 200 + k);
        all_degenerate = all_degenerate && !v.minimal;
        const double c = std::abs(v.direction.sum()) / std::sqrt(static_cast<double>(k)) / v.direction.norm();
        worst_angle = std::max(worst_angle, std::acos(std::min(1.0, c)));
    }
    return {worst <= 1e-8 && all_degenerate && worst_angle <= 1e-3,
            "max pairwise distance " + fmt(worst) + " (limit 1e-8); full multinomial " +
                (all_degenerate ? "degenerate" : "NOT flagged") + ", direction angle " + fmt(worst_angle) +
                " (limit 1e-3)"};
}

// The three party curves of both sweeps on one proportion matrix.
Verdict case_study_checks(const Matrix& shares) {
    const auto t0 = Clock::now();
    const auto lehmer = run_sweep(shares, SweepMode::lehmer, default_grid(SweepMode::lehmer).points());
    const auto holder = run_sweep(shares, SweepMode::holder, default_grid(SweepMode::holder).points());
    const double secs = seconds_since(t0);
    int gaps = 0, order = 0;
    std::string monotone = "non-decreasing";
    for (const auto* t : {&lehmer, &holder}) {
        for (const auto& r : t->rows) {
            if (!r.lambda) {
                ++gaps;
                continue;
            }
            const auto& l = *r.lambda;
            if (!(l[0] > l[1] && l[1] > l[2])) ++order;
        }
        try {
            t->validate();
        } catch (const Error& e) {
            monotone = e.what();
        }
    }
    const auto l1 = run_sweep(shares, SweepMode::lehmer, {1.0}).rows[0].lambda;
    const auto h1 = run_sweep(shares, SweepMode::holder, {1.0}).rows[0].lambda;
    double agree = INFINITY;
    if (l1 && h1) {
        agree = 0.0;
        for (int j = 0; j < 3; ++j) agree = std::max(agree, rel_err((*l1)[j], (*h1)[j]));
    }
    const bool ok = gaps == 0 && order == 0 && monotone == "non-decreasing" && agree <= 1e-12 && secs < 10.0;
    return {ok, std::to_string(shares.rows()) + " cycles; gaps " + std::to_string(gaps) +
                    ", points without dem > rep > other " + std::to_string(order) + ", curves " + monotone +
                    ", order-1 agreement " + fmt(agree) + " (limit 1e-12), " + fmt(secs) + " s (limit 10 s)"};
}

Matrix load_shares(const std::string& path, const PipelineConfig& pc) {
    const auto loaded = load_returns(path, pc.schema);
    return aggregate(loaded.rows, pc.mapping).shares;
}

Verdict case_study(const Context& ctx) {
    if (!ctx.senate.empty() && std::filesystem::exists(ctx.senate)) {
        return case_study_checks(load_shares(ctx.senate, PipelineConfig{}));
    }
    Verdict v{false, "senate returns file not found at '" + ctx.senate + "'"};
    if (!ctx.fixture.empty()) {
        const auto pc = ctx.fixture_config.empty() ? PipelineConfig{}
                                                   : PipelineConfig::from(KeyValueConfig::load(ctx.fixture_config));
        const auto synthetic = case_study_checks(load_shares(ctx.fixture, pc));
        v.detail += "; synthetic fixture (not a substitute): " + std::string(synthetic.pass ? "holds" : "fails") +
                    ", " + synthetic.detail;
    }
    return v;
}

Verdict weibull_moments() {
    std::mt19937_64 params(110);
    std::uniform_real_distribution<double> lam(0.2, 5.0), kk(0.5, 4.0), tt(0.0, 2.0);
    int outside = 0;
    double worst_z = 0.0, worst_quad = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (int c = 0; c < 20; ++c) {
        const double lambda = lam(params), k = kk(params), t = tt(params);
        std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(c));
        const int n = 1000000;
        CompensatedSum s, s2;
        for (int i = 0; i < n; ++i) {
            const double v = std::pow(sample_weibull(lambda, k, rng), t);
            s += v;
            s2 += v * v;
        }
        const double mean = s.value() / n;
        const double se = std::sqrt(std::max(s2.value() / n - mean * mean, 0.0) / n);
        const double exact = std::pow(lambda, t) * boost::math::tgamma(1.0 + t / k);
        const double z = se > 0.0 ? std::abs(mean - exact) / se : (mean == exact ? 0.0 : INFINITY);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) ++outside;

        const auto model = weibull_model({{k}});
        Vector eta = model.nat_param(Vector::Constant(1, lambda));
        auto f = [&](double x) {
            Vector xv(1);
            xv[0] = x;
            return std::exp(log_pdf(model, xv, eta));
        };
        const double total = ts.integrate(f, 0.0, lambda) + es.integrate(f, lambda, INFINITY);
        worst_quad = std::max(worst_quad, std::abs(total - 1.0));
    }
    return {outside == 0 && worst_quad <= 1e-6, "cases beyond 3 standard errors " + std::to_string(outside) +
                                                    "/20 (largest " + fmt(worst_z) + " SE), max |quadrature - 1| " +
                                                    fmt(worst_quad) + " (limit 1e-6)"};
}

Verdict stability() {
    std::vector<double> xs;
    for (int i = 0; i <= 12; ++i) xs.push_back(std::pow(10.0, -3.0 + 0.5 * i));
    const Sample s = Sample::uniform(xs);
    struct Item {
        const char* name;
        double value, target;
    };
    const std::vector<Item> items{
        {"H+500", holder_mean(MeanOrder(500.0), s), s.max()},
        {"H-500", holder_mean(MeanOrder(-500.0), s), s.min()},
        {"L+500", lehmer_mean(MeanOrder(500.0), s), s.max()},
        {"L-500", lehmer_mean(MeanOrder(-500.0), s), s.min()},
    };
    bool ok = true;
    std::string detail = "13 log-spaced values on [1e-3, 1e3]:";
    for (const auto& it : items) {
        const double e = rel_err(it.value, it.target);
        const bool good = std::isfinite(it.value) && e <= 1e-9;
        ok = ok && good;
        detail += std::string(" ") + it.name + " rel err " + fmt(e) + (good ? "" : " (over 1e-9)") + ";";
    }
    detail += " limit 1e-9";
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    Context ctx;
    app.add_option("--only", only, "Criteria to run")->delimiter(',');
    app.add_option("--senate", ctx.senate, "Senate returns file for the case study");
    app.add_option("--fixture", ctx.fixture, "Synthetic returns file reported when the senate file is missing");
    app.add_option("--fixture-config", ctx.fixture_config, "Pipeline config for the fixture");
    CLI11_PARSE(app, argc, argv);

    const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
        {1, {"pythagorean identities", pythagorean}},
        {2, {"link identity", link_identity}},
        {3, {"ordering and bounds", ordering_and_bounds}},
        {4, {"lehmer mean as MWLE", lehmer_as_mwle}},
        {5, {"holder mean as MWLE", holder_as_mwle}},
        {6, {"generic solver oracle", generic_solver}},
        {7, {"calculus checks", calculus}},
        {8, {"uniqueness and identifiability", uniqueness}},
        {9, {"senate case study", [&] { return case_study(ctx); }}},
        {10, {"weibull moments and normalization", weibull_moments}},
        {11, {"stability at order +-500", stability}},
    };
    const std::set<int> selected(only.begin(), only.end());
    int failures = 0;
    for (const auto& [id, c] : criteria) {
        if (!selected.empty() && !selected.count(id)) continue;
        Verdict v;
        try {
            v = c.second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, c.first.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
