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

#include <optional>
#include <string>
#include <vector>

namespace mwmean {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<std::optional<double>> y;  // nullopt breaks the line
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

// Round-number tick positions covering [lo, hi], roughly `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

// Standalone SVG line chart on a fixed 800x600 viewBox with axes, ticks and
// a legend. Series cycle through distinct colours and dash patterns.
std::string render_line_chart(const ChartSpec& spec);

}  // namespace mwmean
