// Copyright 2026 The qdrop Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qdrop/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "qdrop/error.hpp"

namespace qdrop {

namespace {

std::vector<std::string> split_line(const std::string &line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

std::string escape(const std::string &text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr const char *kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct Frame {
    double left{60}, right{20}, top{40}, bottom{50};
    double w{}, h{};
    double x0{}, x1{}, y0{}, y1{};
    bool log_y{false};

    [[nodiscard]] double px(double x) const {
        return left + (x - x0) / (x1 - x0) * (w - left - right);
    }
    [[nodiscard]] double py(double y) const {
        const double v = log_y ? std::log10(y) : y;
        return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom);
    }
};

void widen(double &lo, double &hi) {
    if (hi - lo < 1e-300) {
        lo -= 0.5;
        hi += 0.5;
    }
}

std::string open_svg(const ChartStyle &style, const Frame &f) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width
      << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width
      << ' ' << style.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty()) {
        s << "<text x=\"" << f.w / 2 << "\" y=\"20\" text-anchor=\"middle\">"
          << escape(style.title) << "</text>\n";
    }
    // axes
    s << "<line x1=\"" << f.left << "\" y1=\"" << f.h - f.bottom << "\" x2=\""
      << f.w - f.right << "\" y2=\"" << f.h - f.bottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left
      << "\" y2=\"" << f.h - f.bottom << "\" stroke=\"black\"/>\n";
    const double y_lo = f.log_y ? std::pow(10.0, f.y0) : f.y0;
    const double y_hi = f.log_y ? std::pow(10.0, f.y1) : f.y1;
    s << "<text x=\"" << f.left - 4 << "\" y=\"" << f.h - f.bottom
      << "\" text-anchor=\"end\" font-size=\"10\">" << num(y_lo) << "</text>\n"
      << "<text x=\"" << f.left - 4 << "\" y=\"" << f.top + 10
      << "\" text-anchor=\"end\" font-size=\"10\">" << num(y_hi) << "</text>\n";
    if (!style.x_label.empty()) {
        s << "<text x=\"" << f.w / 2 << "\" y=\"" << f.h - 10
          << "\" text-anchor=\"middle\">" << escape(style.x_label)
          << "</text>\n";
    }
    if (!style.y_label.empty()) {
        s << "<text x=\"14\" y=\"" << f.h / 2
          << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << f.h / 2
          << ")\">" << escape(style.y_label) << "</text>\n";
    }
    return s.str();
}

} // namespace

std::size_t CsvTable::column_index(const std::string &name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    QDROP_ABORT_IF(it == header.end(), "no column named \"" + name + "\"");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numeric(const std::string &name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    for (const auto &row : rows) {
        const auto &cell = row[c];
        if (cell == "inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        QDROP_ABORT_IF(used == 0 || used != cell.size(),
                       "column \"" + name + "\" holds non-numeric \"" + cell +
                           "\"");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> CsvTable::text(const std::string &name) const {
    const std::size_t c = column_index(name);
    std::vector<std::string> out;
    for (const auto &row : rows) {
        out.push_back(row[c]);
    }
    return out;
}

CsvTable read_csv(std::istream &in, const std::string &source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        QDROP_ABORT_IF(cells.size() != table.header.size(),
                       source + ":" + std::to_string(line_no) + ": " +
                           std::to_string(cells.size()) + " columns, header has " +
                           std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    QDROP_ABORT_IF(table.header.empty(), source + ": missing header row");
    return table;
}

CsvTable read_csv_file(const std::string &path) {
    std::ifstream in(path);
    QDROP_ABORT_IF(!in, "cannot open " + path);
    return read_csv(in, path);
}

std::string render_line_svg(const std::vector<Series> &series,
                            const ChartStyle &style) {
    QDROP_ABORT_IF(series.empty(), "nothing to plot");
    Frame f;
    f.w = style.width;
    f.h = style.height;
    f.log_y = style.log_y;
    f.x0 = f.y0 = std::numeric_limits<double>::infinity();
    f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
    for (const auto &s : series) {
        QDROP_ABORT_IF(s.x.size() != s.y.size(),
                       "series \"" + s.label + "\" has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) ||
                (style.log_y && s.y[i] <= 0.0)) {
                continue;
            }
            const double y = style.log_y ? std::log10(s.y[i]) : s.y[i];
            f.x0 = std::min(f.x0, s.x[i]);
            f.x1 = std::max(f.x1, s.x[i]);
            f.y0 = std::min(f.y0, y);
            f.y1 = std::max(f.y1, y);
        }
    }
    QDROP_ABORT_IF(!std::isfinite(f.x0), "no plottable points");
    widen(f.x0, f.x1);
    widen(f.y0, f.y1);

    std::string svg = open_svg(style, f);
    std::ostringstream s;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto &ser = series[k];
        const char *colour = kPalette[k % std::size(kPalette)];
        s << "<polyline fill=\"none\" stroke=\"" << colour
          << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i]) ||
                (style.log_y && ser.y[i] <= 0.0)) {
                continue;
            }
            s << num(f.px(ser.x[i])) << ',' << num(f.py(ser.y[i])) << ' ';
        }
        s << "\"/>\n";
        s << "<text x=\"" << f.w - f.right - 4 << "\" y=\"" << f.top + 14 * k
          << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colour
          << "\">" << escape(ser.label) << "</text>\n";
    }
    return svg + s.str() + "</svg>\n";
}

std::string render_bar_svg(const std::vector<Bar> &bars,
                           const ChartStyle &style) {
    QDROP_ABORT_IF(bars.empty(), "nothing to plot");
    Frame f;
    f.w = style.width;
    f.h = style.height;
    f.x0 = 0.0;
    f.x1 = static_cast<double>(bars.size());
    f.y0 = 0.0;
    f.y1 = 0.0;
    for (const auto &b : bars) {
        QDROP_ABORT_IF(!std::isfinite(b.value) || !std::isfinite(b.error),
                       "bar \"" + b.label + "\" is not finite");
        f.y0 = std::min(f.y0, b.value - b.error);
        f.y1 = std::max(f.y1, b.value + b.error);
    }
    widen(f.y0, f.y1);

    std::string svg = open_svg(style, f);
    std::ostringstream s;
    const double slot = f.px(1.0) - f.px(0.0);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto &b = bars[i];
        const double x = f.px(static_cast<double>(i)) + 0.15 * slot;
        const double top = f.py(std::max(b.value, 0.0));
        const double base = f.py(std::min(b.value, 0.0));
        s << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\""
          << num(0.7 * slot) << "\" height=\"" << num(base - top)
          << "\" fill=\"" << kPalette[i % std::size(kPalette)] << "\"/>\n";
        const double cx = x + 0.35 * slot;
        if (b.error > 0.0) {
            const double hi = f.py(b.value + b.error);
            const double lo = f.py(b.value - b.error);
            s << "<line class=\"whisker\" x1=\"" << num(cx) << "\" y1=\""
              << num(lo) << "\" x2=\"" << num(cx) << "\" y2=\"" << num(hi)
              << "\" stroke=\"black\"/>\n";
        }
        s << "<text x=\"" << num(cx) << "\" y=\"" << f.h - f.bottom + 14
          << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(b.label)
          << "</text>\n";
    }
    return svg + s.str() + "</svg>\n";
}

} // namespace qdrop
