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

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwmean/expfam.hpp"
#include "mwmean/means.hpp"
#include "mwmean/numeric.hpp"
#include "mwmean/svg.hpp"

namespace mwmean {

// Inclusive arithmetic grid start, start+step, ..., stop.
struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    // "start:stop:step"; throws ConfigError on malformed text or step <= 0.
    static Grid parse(std::string_view text);
    std::vector<double> points() const;
};

enum class SweepMode { lehmer, holder };

Grid default_grid(SweepMode mode);

struct SweepRow {
    double order = 0.0;
    std::optional<std::array<double, 3>> lambda;  // (dem, rep, other); empty on failure
    std::string error;
};

// MWLE of the three Weibull scales as a function of the mean order
// (beta for the Lehmer policy, shape k for the Hölder policy).
struct SweepTable {
    std::string parameter;  // "beta" or "k"
    std::vector<SweepRow> rows;

    // Grid strictly ascending, every estimate finite and positive, every
    // column non-decreasing along the grid. Gap rows are skipped. Throws
    // NumericError otherwise.
    void validate() const;
};

// One fit per grid point on an n x 3 matrix of positive shares. Failures at
// a point become gap rows; the sweep continues.
SweepTable run_sweep(const Matrix& shares, SweepMode mode, const std::vector<double>& grid);

// Header "order,lambda_dem,lambda_rep,lambda_oth", shortest round-trip
// numbers, empty fields for gap rows.
std::string to_csv(const SweepTable& table);
SweepTable parse_sweep_csv(std::istream& in, std::string parameter);

ChartSpec sweep_chart(const SweepTable& table, SweepMode mode);

// Weight curves of a pair (a, b) with unit w-weights, plotted against alpha
// in the x^alpha convention: vl_a = a^alpha / (a^alpha + b^alpha) and
// vh_a = a^alpha / 2, which are v_weights of order alpha + 1.
// Columns alpha, vl_a, vl_b, vh_a, vh_b.
struct VWeightRow {
    double alpha = 0.0;
    double vl_a = 0.0, vl_b = 0.0, vh_a = 0.0, vh_b = 0.0;
};
std::vector<VWeightRow> vweight_curves(double a, double b, const std::vector<double>& alphas);
std::string vweights_csv(const std::vector<VWeightRow>& rows);
ChartSpec vweights_chart(const std::vector<VWeightRow>& rows, double a, double b);

}  // namespace mwmean
