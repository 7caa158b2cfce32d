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
#include "qdrop/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qdrop/error.hpp"
#include "qdrop/random.hpp"

namespace qdrop {

namespace {

std::vector<double> grid(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo
                        : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(n - 1);
    }
    return out;
}

template <typename Fn>
RawDataset regression_set(Task task, std::size_t n, NoiseSpec noise,
                          std::uint64_t seed, double x_min, double x_max,
                          Fn &&fn) {
    QDROP_ABORT_IF(n < 2, "a dataset needs at least two samples");
    QDROP_ABORT_IF(!(x_max > x_min), "empty input interval");
    QDROP_ABORT_IF(noise.std < 0.0, "noise standard deviation must be >= 0");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, noise.std);
    RawDataset data;
    data.task = task;
    for (double x : grid(n, x_min, x_max)) {
        const double eps = noise.std > 0.0 ? noise.amplitude * gauss(rng) : 0.0;
        data.features.push_back({x});
        data.targets.push_back(fn(x) + eps);
    }
    return data;
}

double clamp_abs(double v, double limit, std::size_t &count) {
    if (v > limit) {
        ++count;
        return limit;
    }
    if (v < -limit) {
        ++count;
        return -limit;
    }
    return v;
}

} // namespace

const char *task_name(Task task) {
    switch (task) {
    case Task::Sin:
        return "sin";
    case Task::Module:
        return "module";
    case Task::Moons:
        return "moons";
    }
    return "?";
}

Task task_from_name(std::string_view name) {
    for (auto t : {Task::Sin, Task::Module, Task::Moons}) {
        if (name == task_name(t)) {
            return t;
        }
    }
    abort_with("unknown task '" + std::string(name) + "'");
}

RawDataset gen_sin(std::size_t n, NoiseSpec noise, std::uint64_t seed,
                   double x_min, double x_max) {
    return regression_set(Task::Sin, n, noise, seed, x_min, x_max, [](double x) {
        return std::sin(std::numbers::pi * x);
    });
}

RawDataset gen_module(std::size_t n, NoiseSpec noise, std::uint64_t seed,
                      double x_min, double x_max) {
    return regression_set(Task::Module, n, noise, seed, x_min, x_max,
                          [](double x) { return std::abs(x) - 0.5; });
}

RawDataset gen_moons(std::size_t n, NoiseSpec noise, std::uint64_t seed) {
    QDROP_ABORT_IF(n < 2 || n % 2 != 0,
                   "moons needs an even sample count >= 2");
    QDROP_ABORT_IF(noise.std < 0.0, "noise standard deviation must be >= 0");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, noise.std);
    const auto t = grid(n / 2, 0.0, std::numbers::pi);
    RawDataset data;
    data.task = Task::Moons;
    for (int label = 0; label < 2; ++label) {
        for (double ti : t) {
            std::vector<double> p =
                label == 0
                    ? std::vector<double>{std::cos(ti), std::sin(ti)}
                    : std::vector<double>{1.0 - std::cos(ti), 0.5 - std::sin(ti)};
            data.features.push_back(std::move(p));
            data.targets.push_back(label);
        }
    }
    if (noise.std > 0.0) {
        for (auto &row : data.features) {
            for (auto &v : row) {
                v += noise.amplitude * gauss(rng);
            }
        }
    }
    return data;
}

MinMaxScaler MinMaxScaler::fit(const std::vector<std::vector<double>> &rows) {
    QDROP_ABORT_IF(rows.empty(), "cannot fit a scaler on no rows");
    MinMaxScaler s;
    s.min = rows.front();
    s.max = rows.front();
    for (const auto &r : rows) {
        QDROP_ABORT_IF(r.size() != s.min.size(), "ragged feature rows");
        for (std::size_t j = 0; j < r.size(); ++j) {
            s.min[j] = std::min(s.min[j], r[j]);
            s.max[j] = std::max(s.max[j], r[j]);
        }
    }
    for (std::size_t j = 0; j < s.min.size(); ++j) {
        QDROP_ABORT_IF(s.min[j] == s.max[j],
                       "degenerate column " + std::to_string(j) +
                           " (min == max) cannot be scaled");
    }
    return s;
}

double MinMaxScaler::apply(std::size_t column, double value) const {
    const double lo = min.at(column);
    const double hi = max.at(column);
    if (value == lo) {
        return -1.0;
    }
    if (value == hi) {
        return 1.0;
    }
    return 2.0 * (value - lo) / (hi - lo) - 1.0;
}

double embedding_limit(Task task) { return is_classification(task) ? 2.0 : 1.0; }

std::vector<Sample> PreparedDataset::train_samples() const {
    std::vector<Sample> out;
    const double limit = embedding_limit(task);
    std::size_t ignored = 0;
    for (auto i : train_indices) {
        Sample s{features[i], targets[i]};
        for (auto &v : s.x) {
            v = clamp_abs(v, limit, ignored);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sample> PreparedDataset::test_samples() const {
    std::vector<Sample> out;
    const double limit = embedding_limit(task);
    std::size_t ignored = 0;
    for (auto i : test_indices) {
        Sample s{features[i], targets[i]};
        for (auto &v : s.x) {
            v = clamp_abs(v, limit, ignored);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::vector<double>> PreparedDataset::train_inputs() const {
    std::vector<std::vector<double>> out;
    for (auto &s : train_samples()) {
        out.push_back(std::move(s.x));
    }
    return out;
}

PreparedDataset scale_with_split(const RawDataset &raw,
                                 std::vector<std::size_t> train_indices) {
    const std::size_t n = raw.features.size();
    QDROP_ABORT_IF(raw.targets.size() != n, "feature/target count mismatch");
    std::sort(train_indices.begin(), train_indices.end());
    QDROP_ABORT_IF(std::adjacent_find(train_indices.begin(),
                                      train_indices.end()) !=
                       train_indices.end(),
                   "duplicate train index");
    QDROP_ABORT_IF(train_indices.empty() || train_indices.size() >= n,
                   "split must leave at least one sample on each side");
    QDROP_ABORT_IF(train_indices.back() >= n, "train index out of range");

    PreparedDataset out;
    out.task = raw.task;
    out.raw = raw;
    out.train_indices = train_indices;
    std::vector<char> is_train(n, 0);
    for (auto i : train_indices) {
        is_train[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_train[i]) {
            out.test_indices.push_back(i);
        }
    }

    std::vector<std::vector<double>> train_rows;
    std::vector<std::vector<double>> train_targets;
    for (auto i : train_indices) {
        train_rows.push_back(raw.features[i]);
        train_targets.push_back({raw.targets[i]});
    }
    out.feature_scaler = MinMaxScaler::fit(train_rows);
    if (!is_classification(raw.task)) {
        out.target_scaler = MinMaxScaler::fit(train_targets);
    }

    const double limit = embedding_limit(raw.task);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(raw.features[i].size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = out.feature_scaler.apply(j, raw.features[i][j]);
            if (std::abs(row[j]) > limit) {
                ++out.clamp_count;
            }
        }
        out.features.push_back(std::move(row));
        out.targets.push_back(out.target_scaler
                                  ? out.target_scaler->apply(0, raw.targets[i])
                                  : raw.targets[i]);
    }
    return out;
}

PreparedDataset fit_scale_split(const RawDataset &raw, double train_fraction,
                                std::uint64_t seed) {
    const std::size_t n = raw.features.size();
    QDROP_ABORT_IF(!(train_fraction > 0.0 && train_fraction < 1.0),
                   "train fraction must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    QDROP_ABORT_IF(n_train < 1 || n_train >= n,
                   "train fraction leaves an empty side");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(n_train);
    return scale_with_split(raw, std::move(order));
}

PreparedDataset make_task_dataset(Task task, std::uint64_t seed) {
    switch (task) {
    case Task::Sin:
        return fit_scale_split(gen_sin(20, {0.4, 0.5}, seed), 0.75, seed + 1);
    case Task::Module:
        return fit_scale_split(gen_module(20, {0.3, 0.5}, seed), 0.75, seed + 1);
    case Task::Moons:
        return fit_scale_split(gen_moons(50, {1.0, 0.2}, seed), 0.4, seed + 1);
    }
    abort_with("unknown task");
}

void write_dataset_csv(const PreparedDataset &data, const std::string &path) {
    std::ofstream out(path);
    QDROP_ABORT_IF(!out, "cannot open " + path + " for writing");
    const std::size_t arity = data.raw.features.empty()
                                  ? 0
                                  : data.raw.features.front().size();
    for (std::size_t j = 0; j < arity; ++j) {
        out << 'x' << (j + 1) << ',';
    }
    out << "y,split\n";
    std::vector<char> is_train(data.raw.features.size(), 0);
    for (auto i : data.train_indices) {
        is_train[i] = 1;
    }
    out << std::setprecision(17);
    for (std::size_t i = 0; i < data.raw.features.size(); ++i) {
        for (double v : data.raw.features[i]) {
            out << v << ',';
        }
        out << data.raw.targets[i] << ',' << (is_train[i] ? "train" : "test")
            << '\n';
    }
}

PreparedDataset read_dataset_csv(const std::string &path, Task task) {
    std::ifstream in(path);
    QDROP_ABORT_IF(!in, "cannot open dataset " + path);
    std::string line;
    QDROP_ABORT_IF(!std::getline(in, line), "empty dataset file " + path);
    std::size_t columns = 1 + static_cast<std::size_t>(
                                  std::count(line.begin(), line.end(), ','));
    QDROP_ABORT_IF(columns < 3, "dataset header needs x columns, y and split");
    const std::size_t arity = columns - 2;
    RawDataset raw;
    raw.task = task;
    std::vector<std::size_t> train;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        QDROP_ABORT_IF(cells.size() != columns,
                       "dataset row has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(columns));
        std::vector<double> row;
        for (std::size_t j = 0; j < arity; ++j) {
            row.push_back(std::stod(cells[j]));
        }
        if (cells.back() == "train") {
            train.push_back(raw.features.size());
        } else {
            QDROP_ABORT_IF(cells.back() != "test",
                           "split column must be train or test");
        }
        raw.features.push_back(std::move(row));
        raw.targets.push_back(std::stod(cells[arity]));
    }
    return scale_with_split(raw, std::move(train));
}

} // namespace qdrop
