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
 * Synthetic datasets and train-fitted min-max scaling.
 *
 * Noise model: y += amplitude * g with g ~ Normal(0, std^2). Regression inputs
 * lie on a uniform grid; moons follow the usual two interleaved half circles.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdrop/loss.hpp"

namespace qdrop {

enum class Task { Sin, Module, Moons };

const char *task_name(Task task);
Task task_from_name(std::string_view name);
[[nodiscard]] inline bool is_classification(Task task) {
    return task == Task::Moons;
}

struct RawDataset {
    Task task{Task::Sin};
    std::vector<std::vector<double>> features; ///< one row per sample
    std::vector<double> targets;
};

struct NoiseSpec {
    double amplitude;
    double std;
};

RawDataset gen_sin(std::size_t n = 20, NoiseSpec noise = {0.4, 0.5},
                   std::uint64_t seed = 0, double x_min = -1.0,
                   double x_max = 1.0);
RawDataset gen_module(std::size_t n = 20, NoiseSpec noise = {0.3, 0.5},
                      std::uint64_t seed = 0, double x_min = -1.0,
                      double x_max = 1.0);
RawDataset gen_moons(std::size_t n = 50, NoiseSpec noise = {1.0, 0.2},
                     std::uint64_t seed = 0);

/// Per-column affine map [min, max] -> [-1, 1].
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;

    static MinMaxScaler fit(const std::vector<std::vector<double>> &rows);
    [[nodiscard]] double apply(std::size_t column, double value) const;
};

struct PreparedDataset {
    Task task{Task::Sin};
    RawDataset raw;
    std::vector<std::vector<double>> features; ///< scaled, before clamping
    std::vector<double> targets;               ///< scaled for regression
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    MinMaxScaler feature_scaler;
    std::optional<MinMaxScaler> target_scaler;
    /// Number of feature values clamped into the embedding domain.
    std::size_t clamp_count{0};

    /// Circuit-ready samples (embedding-safe features).
    [[nodiscard]] std::vector<Sample> train_samples() const;
    [[nodiscard]] std::vector<Sample> test_samples() const;
    [[nodiscard]] std::vector<std::vector<double>> train_inputs() const;
};

/// Shuffles indices with `seed`, keeps round(train_fraction * n) for
/// training, fits scalers on those and applies them to everything.
PreparedDataset fit_scale_split(const RawDataset &raw, double train_fraction,
                                std::uint64_t seed);

/// Same, with an explicit train split.
PreparedDataset scale_with_split(const RawDataset &raw,
                                 std::vector<std::size_t> train_indices);

/// Protocol dataset for a task: default sizes, noise and split ratio.
PreparedDataset make_task_dataset(Task task, std::uint64_t seed);

/// Largest |x| the embedding of the task accepts.
double embedding_limit(Task task);

/// CSV with header x1[,x2],y,split holding raw values.
void write_dataset_csv(const PreparedDataset &data, const std::string &path);
PreparedDataset read_dataset_csv(const std::string &path, Task task);

} // namespace qdrop
