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
#include <doctest.h>

#include <cmath>
#include <random>

#include "mwmean/error.hpp"
#include "mwmean/means.hpp"
#include "oracles.hpp"

using namespace mwmean;
using mwmean::testing::rel_err;

namespace {
const Sample kPair = Sample::uniform({0.6, 2.0});
}

TEST_CASE("f-mean") {
    auto id = [](double x) { return x; };
    CHECK(f_mean(id, id, std::vector<double>{0.6, 2.0}) == doctest::Approx(1.3).epsilon(1e-15));

    auto sq = [](double x) { return x * x; };
    auto sqrt_ = [](double y) { return std::sqrt(y); };
    for (double c : {0.0, 0.25, 3.0, 1e6}) CHECK(f_mean(sq, sqrt_, std::vector<double>{c, c}) == c);

    auto ln = [](double x) { return std::log(x); };
    auto ex = [](double y) { return std::exp(y); };
    CHECK(f_mean(ln, ex, std::vector<double>{0.6, 2.0}) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-14));

    CHECK_THROWS_AS(f_mean(id, id, std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(f_mean(ln, ex, std::vector<double>{0.0, 1.0}), NumericError);
}

TEST_CASE("holder mean examples") {
    CHECK(holder_mean(MeanOrder(1.0), kPair) == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(holder_mean(MeanOrder(-1.0), kPair) == doctest::Approx(12.0 / 13.0).epsilon(1e-15));
    CHECK(holder_mean(MeanOrder::pos_inf(), kPair) == 2.0);
    CHECK(holder_mean(MeanOrder::neg_inf(), kPair) == 0.6);
    CHECK(holder_mean(MeanOrder(0.0), kPair) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-15));
}

TEST_CASE("lehmer mean examples") {
    CHECK(lehmer_mean(MeanOrder(1.0), kPair) == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(lehmer_mean(MeanOrder(0.0), kPair) == doctest::Approx(12.0 / 13.0).epsilon(1e-15));
    CHECK(lehmer_mean(MeanOrder(2.0), kPair) == doctest::Approx(4.36 / 2.6).epsilon(1e-15));
    CHECK(lehmer_mean(MeanOrder::pos_inf(), kPair) == 2.0);
    CHECK(lehmer_mean(MeanOrder(0.5), kPair) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-15));
}

TEST_CASE("weights enter as multiplicities") {
    const Sample weighted({0.6, 2.0}, {1.0, 2.0});
    const Sample repeated = Sample::uniform({0.6, 2.0, 2.0});
    for (double a : {-2.0, -0.5, 0.0, 0.7, 1.0, 3.0}) {
        CHECK(holder_mean(MeanOrder(a), weighted) == doctest::Approx(holder_mean(MeanOrder(a), repeated)).epsilon(1e-14));
        CHECK(lehmer_mean(MeanOrder(a), weighted) == doctest::Approx(lehmer_mean(MeanOrder(a), repeated)).epsilon(1e-14));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(Sample::uniform({}), DomainError);
    CHECK_THROWS_AS(Sample({1.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(Sample({-1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(Sample({1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(MeanOrder(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(MeanOrder(std::nan("")), DomainError);

    const Sample with_zero = Sample::uniform({0.0, 2.0});
    CHECK(holder_mean(MeanOrder(1.0), with_zero) == doctest::Approx(1.0));
    CHECK(holder_mean(MeanOrder(2.0), with_zero) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(holder_mean(MeanOrder(0.0), with_zero), DomainError);
    CHECK_THROWS_AS(holder_mean(MeanOrder(-1.0), with_zero), DomainError);
    CHECK_THROWS_AS(holder_mean(MeanOrder::neg_inf(), with_zero), DomainError);
    CHECK(lehmer_mean(MeanOrder(2.0), with_zero) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lehmer_mean(MeanOrder(1.0), with_zero), DomainError);
    CHECK_THROWS_AS(lehmer_mean(MeanOrder(0.5), with_zero), DomainError);
    CHECK_THROWS_AS(lehmer_mean(MeanOrder(2.0), Sample::uniform({0.0, 0.0})), DomainError);
}

TEST_CASE("order parsing") {
    CHECK(MeanOrder::parse("inf").kind() == MeanOrder::Kind::pos_inf);
    CHECK(MeanOrder::parse("+Inf").kind() == MeanOrder::Kind::pos_inf);
    CHECK(MeanOrder::parse("-inf").kind() == MeanOrder::Kind::neg_inf);
    CHECK(MeanOrder::parse("-2.5").value() == -2.5);
    CHECK(MeanOrder::parse("+3").value() == 3.0);
    CHECK_THROWS_AS(MeanOrder::parse("abc"), DomainError);
    CHECK_THROWS_AS(MeanOrder::parse(""), DomainError);
    CHECK_THROWS_AS(MeanOrder::parse("1e400"), DomainError);
}

TEST_CASE("v-weights") {
    auto vl = v_weights(MeanKind::lehmer, MeanOrder(1.0), kPair);
    CHECK(vl[0] == doctest::Approx(0.5));
    CHECK(vl[1] == doctest::Approx(0.5));

    for (double a : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
        vl = v_weights(MeanKind::lehmer, MeanOrder(a), kPair);
        const double d = std::pow(0.6, a - 1) + std::pow(2.0, a - 1);
        CHECK(vl[0] == doctest::Approx(std::pow(0.6, a - 1) / d).epsilon(1e-13));
        CHECK(vl[1] == doctest::Approx(std::pow(2.0, a - 1) / d).epsilon(1e-13));
        // The plotted curves x^a / (0.6^a + 2^a) are the weights of order a + 1.
        const auto shifted = v_weights(MeanKind::lehmer, MeanOrder(a + 1), kPair);
        const double e = std::pow(0.6, a) + std::pow(2.0, a);
        CHECK(shifted[0] == doctest::Approx(std::pow(0.6, a) / e).epsilon(1e-13));
        CHECK(shifted[1] == doctest::Approx(std::pow(2.0, a) / e).epsilon(1e-13));
        const auto vh = v_weights(MeanKind::holder, MeanOrder(a), kPair);
        CHECK(vh[0] == doctest::Approx(std::pow(0.6, a - 1) / 2).epsilon(1e-13));
        if (a != 1.0) {
            const double total = holder_v_weight_total(MeanOrder(a), kPair);
            CHECK(vh[0] + vh[1] == doctest::Approx(total).epsilon(1e-13));
            const double h = holder_mean(MeanOrder(a - 1), kPair);
            CHECK(total == doctest::Approx(std::pow(h, a - 1)).epsilon(1e-12));
        }
    }

    const auto vh = v_weights(MeanKind::holder, MeanOrder(2.0), kPair);
    CHECK(vh[0] == doctest::Approx(0.3));
    CHECK(vh[1] == doctest::Approx(1.0));

    const auto top = v_weights(MeanKind::lehmer, MeanOrder::pos_inf(), kPair);
    CHECK(top[0] == 0.0);
    CHECK(top[1] == 1.0);
    const auto hinf = v_weights(MeanKind::holder, MeanOrder::pos_inf(), kPair);
    CHECK(hinf[0] == 0.0);
    CHECK(std::isinf(hinf[1]));

    CHECK_THROWS_AS(v_weights(MeanKind::lehmer, MeanOrder(0.0), Sample::uniform({0.0, 1.0})), DomainError);
}

TEST_CASE("v-weight monotonicity around one") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> below(0.01, 0.99), above(1.01, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Sample s = Sample::uniform({below(rng), above(rng)});
        for (auto kind : {MeanKind::lehmer, MeanKind::holder}) {
            double prev_a = std::numeric_limits<double>::infinity(), prev_b = -1.0;
            for (double a = -5.0; a <= 5.0; a += 0.25) {
                const auto v = v_weights(kind, MeanOrder(a), s);
                CHECK(v[0] <= prev_a);
                CHECK(v[1] >= prev_b);
                prev_a = v[0];
                prev_b = v[1];
            }
        }
    }
}

TEST_CASE("properties on random samples") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> size(1, 20);
    std::uniform_real_distribution<double> order(-6.0, 6.0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = static_cast<std::size_t>(size(rng));
        auto xs = testing::random_positive(rng, n, 0.01, 10.0);
        auto ws = testing::random_positive(rng, n, 0.1, 3.0);
        const Sample s(xs, ws);
        const double lo = s.min(), hi = s.max();
        const double am = testing::arithmetic(xs, ws);
        const double a = order(rng);
        const double h = holder_mean(MeanOrder(a), s);
        const double l = lehmer_mean(MeanOrder(a), s);
        CAPTURE(a);
        CHECK(lo <= h);
        CHECK(h <= hi);
        CHECK(lo <= l);
        CHECK(l <= hi);
        // Against extended-precision brute force.
        CHECK(rel_err(h, testing::naive_holder(a, xs, ws)) < 1e-12);
        CHECK(rel_err(l, testing::naive_lehmer(a, xs, ws)) < 1e-12);
        // Ordering relative to the arithmetic mean and to each other.
        const double slack = 1e-13 * hi;
        if (a < 1.0) {
            CHECK(h <= am + slack);
            CHECK(l <= am + slack);
            CHECK(l <= h + slack);
        } else {
            CHECK(h >= am - slack);
            CHECK(l >= am - slack);
            CHECK(l >= h - slack);
        }
        // Link identity.
        const double hm1 = holder_mean(MeanOrder(a - 1.0), s);
        const double link = std::exp(a * std::log(h) - (a - 1.0) * std::log(hm1));
        CHECK(rel_err(l, link) < 1e-10);
    }
}

TEST_CASE("monotone in the order, strictly for distinct values") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const auto xs = testing::random_positive(rng, 6, 0.1, 5.0);
        const Sample s = Sample::uniform(xs);
        double ph = 0.0, pl = 0.0;
        for (int i = 0; i <= 80; ++i) {
            const double a = -4.0 + 0.1 * i;
            const double h = holder_mean(MeanOrder(a), s);
            const double l = lehmer_mean(MeanOrder(a), s);
            if (i > 0) {
                CHECK(h > ph);
                CHECK(l > pl);
            }
            ph = h;
            pl = l;
        }
    }
}

TEST_CASE("extreme orders stay finite and accurate") {
    const std::vector<double> xs{1e-3, 0.02, 0.5, 3.0, 40.0, 700.0, 1e3};
    const std::vector<double> ws(xs.size(), 1.0);
    const Sample s(xs, ws);
    for (double a : {-500.0, 500.0}) {
        const double h = holder_mean(MeanOrder(a), s);
        const double l = lehmer_mean(MeanOrder(a), s);
        CHECK(std::isfinite(h));
        CHECK(std::isfinite(l));
        CHECK(rel_err(h, testing::naive_holder(a, xs, ws)) < 1e-9);
        CHECK(rel_err(l, testing::naive_lehmer(a, xs, ws)) < 1e-9);
    }
    CHECK(rel_err(lehmer_mean(MeanOrder(500.0), s), 1e3) < 1e-9);
    CHECK(rel_err(lehmer_mean(MeanOrder(-500.0), s), 1e-3) < 1e-9);
    // Hölder converges to the extremes only like n^(-1/a).
    CHECK(rel_err(holder_mean(MeanOrder(500.0), s), 1e3 * std::pow(1.0 / 7.0, 1.0 / 500.0)) < 1e-12);
}
