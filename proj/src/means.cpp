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
#include "mwmean/means.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "mwmean/error.hpp"
#include "mwmean/numeric.hpp"

namespace mwmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

// log sum_i w_i x_i^p. Zero values are skipped for p > 0 and rejected for
// p <= 0 (0^0 is treated as a pole too, matching the domain rules above).
double log_power_sum(const Sample& s, double p) {
    const auto xs = s.values();
    const auto ws = s.weights();
    std::vector<double> terms(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            if (p <= 0.0) {
                throw DomainError("zero value at index " + std::to_string(i) +
                                  " raised to non-positive power " + describe(p));
            }
            terms[i] = -kInf;
        } else {
            terms[i] = std::log(ws[i]) + p * std::log(xs[i]);
        }
    }
    return log_sum_exp(terms);
}

void require_positive(const Sample& s, const char* what) {
    const auto xs = s.values();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            throw DomainError(std::string(what) + ": zero value at index " +
                              std::to_string(i) + " not allowed at this order");
        }
    }
}

// Limit weights for Hölder at +-inf: w x^(a-1)/sum w -> 0, w/sum w or inf.
std::vector<double> holder_limit_weights(const Sample& s, bool positive) {
    const double total = s.total_weight();
    const auto xs = s.values();
    const auto ws = s.weights();
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 1.0) {
            out[i] = ws[i] / total;
        } else {
            const bool grows = positive ? xs[i] > 1.0 : xs[i] < 1.0;
            out[i] = grows ? kInf : 0.0;
        }
    }
    return out;
}

}  // namespace

Sample::Sample(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.empty()) throw DomainError("empty sample");
    if (values_.size() != weights_.size()) {
        throw DomainError("sample has " + std::to_string(values_.size()) + " values but " +
                          std::to_string(weights_.size()) + " weights");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
            throw DomainError("value " + describe(values_[i]) + " at index " +
                              std::to_string(i) + " is not a finite non-negative real");
        }
        if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
            throw DomainError("weight " + describe(weights_[i]) + " at index " +
                              std::to_string(i) + " is not a finite positive real");
        }
    }
}

Sample Sample::uniform(std::vector<double> values) {
    std::vector<double> w(values.size(), 1.0);
    return Sample(std::move(values), std::move(w));
}

double Sample::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Sample::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Sample::total_weight() const {
    CompensatedSum s;
    for (double w : weights_) s += w;
    return s.value();
}

MeanOrder::MeanOrder(double alpha) : kind_(Kind::finite), alpha_(alpha) {
    if (!std::isfinite(alpha)) {
        throw DomainError("finite mean order required, got " + describe(alpha) +
                          "; use MeanOrder::pos_inf()/neg_inf()");
    }
}

MeanOrder MeanOrder::parse(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return pos_inf();
    if (t == "-inf" || t == "-infinity") return neg_inf();
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw DomainError("cannot parse mean order '" + std::string(text) + "'");
    }
    return MeanOrder(v);
}

double MeanOrder::value() const {
    switch (kind_) {
        case Kind::pos_inf:
            return kInf;
        case Kind::neg_inf:
            return -kInf;
        case Kind::finite:
            break;
    }
    return alpha_;
}

double f_mean(const std::function<double(double)>& f,
              const std::function<double(double)>& f_inverse,
              std::span<const double> values) {
    if (values.empty()) throw DomainError("empty sample");
    CompensatedSum s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double fx = f(values[i]);
        if (!std::isfinite(fx)) {
            throw NumericError("f is not finite at value " + describe(values[i]) +
                               " (index " + std::to_string(i) + ")");
        }
        s += fx;
    }
    const double result = f_inverse(s.value() / static_cast<double>(values.size()));
    if (!std::isfinite(result)) throw NumericError("f_inverse returned a non-finite value");
    // Rounding can push the result an ulp outside the data range.
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return std::clamp(result, *lo, *hi);
}

double holder_mean(MeanOrder alpha, const Sample& sample) {
    switch (alpha.kind()) {
        case MeanOrder::Kind::pos_inf:
            return sample.max();
        case MeanOrder::Kind::neg_inf:
            require_positive(sample, "holder mean");
            return sample.min();
        case MeanOrder::Kind::finite:
            break;
    }
    const double a = alpha.value();
    if (a == 0.0) {
        require_positive(sample, "holder mean");
        CompensatedSum s;
        const auto xs = sample.values();
        const auto ws = sample.weights();
        for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * std::log(xs[i]);
        return std::exp(s.value() / sample.total_weight());
    }
    const double log_mean = log_power_sum(sample, a) - std::log(sample.total_weight());
    return std::clamp(std::exp(log_mean / a), sample.min(), sample.max());
}

double lehmer_mean(MeanOrder alpha, const Sample& sample) {
    switch (alpha.kind()) {
        case MeanOrder::Kind::pos_inf:
            return sample.max();
        case MeanOrder::Kind::neg_inf:
            require_positive(sample, "lehmer mean");
            return sample.min();
        case MeanOrder::Kind::finite:
            break;
    }
    const double a = alpha.value();
    if (a <= 1.0) require_positive(sample, "lehmer mean");
    if (sample.max() == 0.0) throw DomainError("lehmer mean of an all-zero sample is 0/0");
    const double log_ratio = log_power_sum(sample, a) - log_power_sum(sample, a - 1.0);
    return std::clamp(std::exp(log_ratio), sample.min(), sample.max());
}

std::vector<double> v_weights(MeanKind kind, MeanOrder alpha, const Sample& sample) {
    const auto xs = sample.values();
    const auto ws = sample.weights();
    const std::size_t n = xs.size();

    if (!alpha.is_finite()) {
        const bool positive = alpha.kind() == MeanOrder::Kind::pos_inf;
        if (!positive) require_positive(sample, "v-weights");
        if (kind == MeanKind::holder) return holder_limit_weights(sample, positive);
        // Lehmer: all mass moves onto the extreme values, split by w.
        const double target = positive ? sample.max() : sample.min();
        CompensatedSum mass;
        for (std::size_t i = 0; i < n; ++i) {
            if (xs[i] == target) mass += ws[i];
        }
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (xs[i] == target) out[i] = ws[i] / mass.value();
        }
        return out;
    }

    const double p = alpha.value() - 1.0;
    if (kind == MeanKind::lehmer && alpha.value() <= 1.0) require_positive(sample, "v-weights");
    if (kind == MeanKind::holder && alpha.value() <= 0.0) require_positive(sample, "v-weights");
    std::vector<double> log_terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] == 0.0) {
            if (p <= 0.0) {
                throw DomainError("zero value at index " + std::to_string(i) +
                                  " raised to non-positive power");
            }
            log_terms[i] = -kInf;
        } else {
            log_terms[i] = std::log(ws[i]) + p * std::log(xs[i]);
        }
    }
    const double log_norm = kind == MeanKind::lehmer ? log_sum_exp(log_terms)
                                                     : std::log(sample.total_weight());
    if (kind == MeanKind::lehmer && log_norm == -kInf) {
        throw DomainError("lehmer v-weights of an all-zero sample are undefined");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(log_terms[i] - log_norm);
    return out;
}

double holder_v_weight_total(MeanOrder alpha, const Sample& sample) {
    if (!alpha.is_finite()) {
        CompensatedSum s;
        for (double v : v_weights(MeanKind::holder, alpha, sample)) s += v;
        return s.value();
    }
    const double p = alpha.value() - 1.0;
    if (p == 0.0) return 1.0;
    return std::exp(log_power_sum(sample, p) - std::log(sample.total_weight()));
}

}  // namespace mwmean
