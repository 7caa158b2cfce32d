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
/**
 * @file
 * CSV tables and a minimal SVG chart writer.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdrop {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws when absent.
    [[nodiscard]] std::size_t column_index(const std::string &name) const;
    /// Numeric values of a column ("inf" accepted).
    [[nodiscard]] std::vector<double> numeric(const std::string &name) const;
    [[nodiscard]] std::vector<std::string> text(const std::string &name) const;
};

/// Header row is mandatory; every row must have the header's width.
CsvTable read_csv(std::istream &in, const std::string &source = "csv");
CsvTable read_csv_file(const std::string &path);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Bar {
    std::string label;
    double value{0.0};
    double error{0.0}; ///< whisker half-length, 0 = none
};

struct ChartStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y{false};
    int width{640};
    int height{400};
};

/// One polyline per series.
std::string render_line_svg(const std::vector<Series> &series,
                            const ChartStyle &style);

/// One bar per entry, with error whiskers where error > 0.
std::string render_bar_svg(const std::vector<Bar> &bars,
                           const ChartStyle &style);

} // namespace qdrop
