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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace mwmean {

// Neumaier's variant of compensated summation; robust when addends exceed
// the running sum in magnitude.
class CompensatedSum {
   public:
    CompensatedSum& operator+=(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    double value() const { return sum_ + comp_; }

   private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// log(sum_i exp(a_i)) with the maximum shifted out. Entries equal to -inf
// contribute nothing; an all -inf input yields -inf.
inline double log_sum_exp(std::span<const double> a) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    double hi = neg_inf;
    for (double v : a) hi = std::max(hi, v);
    if (hi == neg_inf) return neg_inf;
    CompensatedSum s;
    for (double v : a) {
        if (v != neg_inf) s += std::exp(v - hi);
    }
    return hi + std::log(s.value());
}

// Shortest decimal form that parses back to the same double.
inline std::string shortest_repr(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

}  // namespace mwmean
