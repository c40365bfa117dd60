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
#include <span>
#include <string_view>
#include <vector>

namespace mwmean {

// One column of observations x_{1,j}..x_{n,j} with their w-weights.
class Sample {
   public:
    // Throws DomainError unless sizes match, n >= 1, values >= 0 and
    // weights > 0 (all finite).
    Sample(std::vector<double> values, std::vector<double> weights);

    static Sample uniform(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return values_.size(); }

    double min() const;
    double max() const;
    double total_weight() const;

   private:
    std::vector<double> values_;
    std::vector<double> weights_;
};

// Order of a Hölder or Lehmer mean. The infinite orders are separate
// variants; a finite order is never allowed to be +-inf or NaN.
class MeanOrder {
   public:
    enum class Kind { finite, pos_inf, neg_inf };

    explicit MeanOrder(double alpha);

    static MeanOrder pos_inf() { return MeanOrder(Kind::pos_inf); }
    static MeanOrder neg_inf() { return MeanOrder(Kind::neg_inf); }

    // Accepts decimal literals plus "inf", "+inf", "-inf" (and "infinity").
    static MeanOrder parse(std::string_view text);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    // Finite value; +-infinity for the sentinel variants.
    double value() const;

   private:
    explicit MeanOrder(Kind k) : kind_(k), alpha_(0.0) {}

    Kind kind_;
    double alpha_;
};

enum class MeanKind { lehmer, holder };

// Quasi-arithmetic (Kolmogorov) mean f^{-1}(mean f(x_i)).
double f_mean(const std::function<double(double)>& f,
              const std::function<double(double)>& f_inverse,
              std::span<const double> values);

// Weighted power mean (sum w x^a / sum w)^(1/a). Order 0 is the weighted
// geometric mean; +-inf give max/min. Evaluated in the log domain.
double holder_mean(MeanOrder alpha, const Sample& sample);

// Weighted Lehmer mean sum w x^a / sum w x^(a-1). +-inf give max/min.
double lehmer_mean(MeanOrder alpha, const Sample& sample);

// Value-dependent selection weights embedded in each family:
//   lehmer: w x^(a-1) / sum w x^(a-1)   (sums to one)
//   holder: w x^(a-1) / sum w           (sums to holder_v_weight_total)
// At infinite orders the pointwise limits are returned.
std::vector<double> v_weights(MeanKind kind, MeanOrder alpha, const Sample& sample);

// Sum of the Hölder v-weights, (H_{a-1})^(a-1) for finite a.
double holder_v_weight_total(MeanOrder alpha, const Sample& sample);

}  // namespace mwmean
