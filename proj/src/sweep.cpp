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
#include "mwmean/sweep.hpp"

#include <charconv>
#include <cmath>

#include "mwmean/config.hpp"
#include "mwmean/error.hpp"
#include "mwmean/families.hpp"
#include "mwmean/mwle.hpp"
#include "mwmean/pipeline.hpp"

namespace mwmean {

Grid Grid::parse(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1) {
        parts.emplace_back(text.substr(start, pos - start));
    }
    parts.emplace_back(text.substr(start));
    if (parts.size() != 3) throw ConfigError("grid must be start:stop:step, got '" + std::string(text) + "'");
    Grid g{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
    if (!(g.step > 0.0) || !std::isfinite(g.step)) throw ConfigError("grid step must be positive");
    if (!std::isfinite(g.start) || !std::isfinite(g.stop) || g.stop < g.start) {
        throw ConfigError("grid needs finite start <= stop");
    }
    return g;
}

std::vector<double> Grid::points() const {
    std::vector<double> pts;
    const double span = (stop - start) / step;
    const auto n = static_cast<long>(std::floor(span + 1e-9));
    for (long i = 0; i <= n; ++i) pts.push_back(start + static_cast<double>(i) * step);
    return pts;
}

Grid default_grid(SweepMode mode) {
    return mode == SweepMode::lehmer ? Grid{-3.0, 4.0, 0.1} : Grid{0.1, 6.0, 0.1};
}

void SweepTable::validate() const {
    std::array<std::optional<double>, 3> prev;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!std::isfinite(r.order)) throw NumericError("sweep order is not finite");
        if (i > 0 && !(r.order > rows[i - 1].order)) throw NumericError("sweep grid is not strictly ascending");
        if (!r.lambda) continue;
        for (std::size_t j = 0; j < 3; ++j) {
            const double v = (*r.lambda)[j];
            if (!std::isfinite(v) || v <= 0.0) {
                throw NumericError("sweep estimate at order " + shortest_repr(r.order) + " is not finite and positive");
            }
            // Monotone in exact arithmetic; allow a few ulps of rounding.
            if (prev[j] && v < *prev[j] * (1.0 - 1e-12)) {
                throw NumericError("sweep column " + std::to_string(j) + " decreases at order " + shortest_repr(r.order));
            }
            prev[j] = v;
        }
    }
}

SweepTable run_sweep(const Matrix& shares, SweepMode mode, const std::vector<double>& grid) {
    if (shares.cols() != 3) throw DomainError("sweep expects three columns (dem, rep, other)");
    SweepTable table;
    table.parameter = mode == SweepMode::lehmer ? "beta" : "k";
    const FamilyModel exponential = weibull_model({{1.0, 1.0, 1.0}});
    for (double order : grid) {
        SweepRow row;
        row.order = order;
        try {
            Vector lambda;
            if (mode == SweepMode::lehmer) {
                lambda = fit(exponential, shares, WeightPolicy::lehmer({order})).theta_hat;
            } else {
                if (!(order > 0.0)) throw ConfigError("holder sweep needs shape k > 0");
                lambda = fit(weibull_model({{order, order, order}}), shares, WeightPolicy::holder()).theta_hat;
            }
            row.lambda = std::array<double, 3>{lambda[0], lambda[1], lambda[2]};
        } catch (const NoSolutionError& e) {
            row.error = std::string(e.what()) + " (attainable: " + e.attainable() + ")";
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_csv(const SweepTable& table) {
    std::string out = "order,lambda_dem,lambda_rep,lambda_oth\n";
    for (const auto& r : table.rows) {
        out += shortest_repr(r.order);
        for (std::size_t j = 0; j < 3; ++j) {
            out += ',';
            if (r.lambda) out += shortest_repr((*r.lambda)[j]);
        }
        out += '\n';
    }
    return out;
}

SweepTable parse_sweep_csv(std::istream& in, std::string parameter) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "order,lambda_dem,lambda_rep,lambda_oth") {
        throw SchemaError("sweep CSV header must be order,lambda_dem,lambda_rep,lambda_oth");
    }
    SweepTable t;
    t.parameter = std::move(parameter);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_delimited(trim(line), ',');
        if (f.size() != 4) throw SchemaError("sweep row needs 4 fields: " + line);
        SweepRow r;
        r.order = parse_double(f[0]);
        if (!f[1].empty() || !f[2].empty() || !f[3].empty()) {
            r.lambda = std::array<double, 3>{parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

ChartSpec sweep_chart(const SweepTable& table, SweepMode mode) {
    ChartSpec c;
    c.title = mode == SweepMode::lehmer ? "MWLE of lambda as the Lehmer mean, by beta"
                                        : "MWLE of lambda as the Holder mean, by shape k";
    c.x_label = table.parameter;
    c.y_label = "lambda";
    const std::array<const char*, 3> labels{"DEMOCRAT", "REPUBLICAN", "OTHER"};
    for (std::size_t j = 0; j < 3; ++j) {
        Series s;
        s.label = labels[j];
        for (const auto& r : table.rows) {
            s.x.push_back(r.order);
            s.y.push_back(r.lambda ? std::optional<double>((*r.lambda)[j]) : std::nullopt);
        }
        c.series.push_back(std::move(s));
    }
    return c;
}

std::vector<VWeightRow> vweight_curves(double a, double b, const std::vector<double>& alphas) {
    const Sample pair = Sample::uniform({a, b});
    std::vector<VWeightRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
        // The plotted curves use x^alpha, i.e. the weights of order alpha + 1.
        const MeanOrder order(alpha + 1.0);
        const auto vl = v_weights(MeanKind::lehmer, order, pair);
        const auto vh = v_weights(MeanKind::holder, order, pair);
        rows.push_back({alpha, vl[0], vl[1], vh[0], vh[1]});
    }
    return rows;
}

std::string vweights_csv(const std::vector<VWeightRow>& rows) {
    std::string out = "alpha,vl_a,vl_b,vh_a,vh_b\n";
    for (const auto& r : rows) {
        out += shortest_repr(r.alpha) + ',' + shortest_repr(r.vl_a) + ',' + shortest_repr(r.vl_b) + ',' +
               shortest_repr(r.vh_a) + ',' + shortest_repr(r.vh_b) + '\n';
    }
    return out;
}

ChartSpec vweights_chart(const std::vector<VWeightRow>& rows, double a, double b) {
    ChartSpec c;
    c.title = "v-weights of the pair (" + shortest_repr(a) + ", " + shortest_repr(b) + ")";
    c.x_label = "alpha";
    c.y_label = "v";
    Series la{"v_l(" + shortest_repr(a) + ")", {}, {}}, lb{"v_l(" + shortest_repr(b) + ")", {}, {}};
    Series ha{"v_h(" + shortest_repr(a) + ")", {}, {}}, hb{"v_h(" + shortest_repr(b) + ")", {}, {}};
    for (const auto& r : rows) {
        for (Series* s : {&la, &lb, &ha, &hb}) s->x.push_back(r.alpha);
        la.y.emplace_back(r.vl_a);
        lb.y.emplace_back(r.vl_b);
        ha.y.emplace_back(r.vh_a);
        hb.y.emplace_back(r.vh_b);
    }
    c.series = {la, lb, ha, hb};
    return c;
}

}  // namespace mwmean
