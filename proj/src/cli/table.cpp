// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The noma-effrate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "noma/cli/table.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace noma::cli {

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    return fmt::format("{:.9g}", v);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

void write_csv(std::ostream& out, const Table& table) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

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

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

}  // namespace

void write_svg(std::ostream& out, const Table& table, const ChartSpec& spec) {
    const std::size_t xc = table.column(spec.x_column);
    std::vector<std::size_t> ycs;
    for (const auto& y : spec.y_columns) ycs.push_back(table.column(y));
    std::vector<std::size_t> context;
    for (const auto& g : spec.group_columns) context.push_back(table.column(g));

    std::vector<Series> series;
    std::map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
        std::string key;
        for (std::size_t c : context) key += table.header[c] + "=" + row[c] + " ";
        for (std::size_t k = 0; k < ycs.size(); ++k) {
            const std::string label = spec.y_columns[k] + (key.empty() ? "" : " " + key);
            auto [it, fresh] = index.emplace(label, series.size());
            if (fresh) series.push_back({label, {}});
            const std::string& xs = row[xc];
            const std::string& ys = row[ycs[k]];
            if (xs.empty() || ys.empty()) continue;
            const double x = std::stod(xs);
            const double y = std::stod(ys);
            if (!std::isfinite(x) || !std::isfinite(y) || (spec.log_y && !(y > 0.0))) continue;
            series[it->second].points.emplace_back(x, spec.log_y ? std::log10(y) : y);
        }
    }

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;

    const double w = 720, h = 480, left = 70, right = 20, top = 40, bottom = 50;
    const double legend_h = 16.0 * static_cast<double>(series.size());
    const double H = h + legend_h;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * (h - top - bottom); };

    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n",
        w, H);
    out << fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", w, H);
    out << fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n", left, escape(spec.title));
    out << fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
        top, w - left - right, h - top - bottom);
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        out << fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(xv),
                           h - bottom + 16, format_number(xv));
        const std::string ylab = spec.log_y ? "1e" + format_number(yv) : format_number(yv);
        out << fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                           py(yv) + 4, ylab);
    }
    out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       (left + w - right) / 2, h - 10, escape(spec.x_column));

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* colour = kPalette[i % kPalette.size()];
        if (!series[i].points.empty()) {
            out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", colour);
            for (std::size_t k = 0; k < series[i].points.size(); ++k) {
                if (k) out << ' ';
                out << fmt::format("{:.2f},{:.2f}", px(series[i].points[k].first),
                                   py(series[i].points[k].second));
            }
            out << "\"/>\n";
        }
        const double ly = h + 16.0 * static_cast<double>(i) + 4;
        out << fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n", left, ly,
                           left + 24, ly, colour);
        out << fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + 30, ly + 4,
                           escape(series[i].label));
    }
    out << "</svg>\n";
}

}  // namespace noma::cli
