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
#include "mwmean/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwmean/error.hpp"

namespace mwmean {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

struct Style {
    const char* color;
    const char* dash;
};

constexpr std::array<Style, 4> kStyles{{
    {"#1f77b4", ""},
    {"#d62728", "8 4"},
    {"#2ca02c", "2 3"},
    {"#9467bd", "12 3 2 3"},
}};

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, end);
}

std::string tick_label(double v, double step) {
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    char buf[40];
    if (std::abs(v) < step * 1e-9) v = 0.0;
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return std::string(buf, end);
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= pad;
        hi += pad;
    }
    const double raw = (hi - lo) / std::max(1, target);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    const double step = (frac < 1.5 ? 1.0 : frac < 3.0 ? 2.0 : frac < 7.0 ? 5.0 : 10.0) * mag;
    std::vector<double> ticks;
    const double first = std::floor(lo / step) * step;
    for (int i = 0;; ++i) {
        const double t = first + i * step;
        ticks.push_back(t);
        if (t >= hi - step * 1e-9) break;
    }
    return ticks;
}

std::string render_line_chart(const ChartSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) throw ConfigError("series '" + s.label + "' has mismatched x/y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            if (s.y[i]) {
                ymin = std::min(ymin, *s.y[i]);
                ymax = std::max(ymax, *s.y[i]);
            }
        }
    }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
    if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
    const auto xt = nice_ticks(xmin, xmax);
    const auto yt = nice_ticks(ymin, ymax);
    const double x0 = xt.front(), x1 = xt.back();
    const double y0 = yt.front(), y1 = yt.back();
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\" "
         "font-family=\"sans-serif\" font-size=\"13\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    o << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << escape(spec.title) << "</text>\n";

    o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double t : xt) o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(t)) << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
    for (double t : yt) o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\"" << num(py(t)) << "\"/>\n";
    o << "</g>\n";
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
    const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
    for (double t : xt) {
        o << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 20) << "\" text-anchor=\"middle\">"
          << tick_label(t, xstep) << "</text>\n";
    }
    for (double t : yt) {
        o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
          << tick_label(t, ystep) << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 20) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const Style& st = kStyles[si % kStyles.size()];
        std::string points;
        auto flush = [&]() {
            if (points.empty()) return;
            o << "<polyline fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
            if (*st.dash) o << " stroke-dasharray=\"" << st.dash << "\"";
            o << " points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!s.y[i]) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += num(px(s.x[i])) + "," + num(py(*s.y[i]));
        }
        flush();
    }

    const double lx = kLeft + 15, ly = kTop + 15;
    o << "<g class=\"legend\">\n";
    o << "<rect x=\"" << num(lx - 8) << "\" y=\"" << num(ly - 12) << "\" width=\"170\" height=\""
      << num(22.0 * static_cast<double>(spec.series.size()) + 8) << "\" fill=\"white\" stroke=\"#888888\"/>\n";
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const Style& st = kStyles[si % kStyles.size()];
        const double y = ly + 22.0 * static_cast<double>(si);
        o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(y) << "\" x2=\"" << num(lx + 40) << "\" y2=\"" << num(y)
          << "\" stroke=\"" << st.color << "\" stroke-width=\"2\"";
        if (*st.dash) o << " stroke-dasharray=\"" << st.dash << "\"";
        o << "/>\n";
        o << "<text x=\"" << num(lx + 50) << "\" y=\"" << num(y + 4) << "\">" << escape(spec.series[si].label)
          << "</text>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

}  // namespace mwmean
