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
 * Dropout training of the QNN models.
 *
 * One epoch = one dropout mask, one full-batch gradient on the masked circuit,
 * one Adam step; train/test losses are then measured on the unmasked circuit.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdrop/circuit_template.hpp"
#include "qdrop/datagen.hpp"
#include "qdrop/dropout.hpp"
#include "qdrop/loss.hpp"

namespace qdrop {

double mse_loss(std::span<const double> predictions,
                std::span<const double> targets);

/// Binary cross entropy on class-1 probabilities (clamped to [1e-12, 1-1e-12]).
double cce_loss(std::span<const double> class1_probabilities,
                std::span<const double> labels);

/// Fraction of samples where (p1 >= 0.5) matches the label.
double accuracy(std::span<const double> class1_probabilities,
                std::span<const double> labels);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    /// Per-slot update counts used for bias correction.
    std::vector<std::uint64_t> steps;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0), steps(n, 0) {}
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/**
 * One Adam update. When `active` is non-empty, slots with active[i] == 0 are
 * left untouched: neither their moments nor their step counts advance.
 */
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, double learning_rate,
               std::span<const char> active = {});

/// Samples with cached embedding trig, evaluated repeatedly during training.
class PreparedBatch {
  public:
    PreparedBatch(CircuitTemplate tmpl, std::vector<Sample> samples);

    [[nodiscard]] const CircuitTemplate &circuit() const { return tmpl_; }
    [[nodiscard]] const std::vector<Sample> &samples() const {
        return samples_;
    }
    [[nodiscard]] std::vector<double> targets() const;

    /// <Z_0> for every sample.
    [[nodiscard]] std::vector<double> outputs(std::span<const double> params,
                                              const DropoutMask &mask = {}) const;
    /// Gradient of the mean loss (adjoint sweep).
    [[nodiscard]] std::vector<double> gradient(std::span<const double> params,
                                               const DropoutMask &mask,
                                               LossKind loss) const;

  private:
    CircuitTemplate tmpl_;
    std::vector<Sample> samples_;
    std::vector<std::vector<HalfAngle>> embedding_;
};

struct TrainConfig {
    Task task{Task::Sin};
    std::size_t n_qubits{5};
    std::size_t n_layers{10};
    double learning_rate{0.01};
    std::size_t epochs{1000};
    DropoutConfig dropout{};
    /// Post-training root k of the (1-p)^(1/k) rescaling; nullopt = off.
    std::optional<double> rescale_k{};
    std::uint64_t base_seed{0};
    std::size_t n_runs{10};
    /// Explicit run seeds; when empty the runs use base_seed + i.
    std::vector<std::uint64_t> seeds{};
    /// Dropped slots skip Adam moment updates (false: feed zero gradients).
    bool adam_skip_dropped{true};

    /// Protocol defaults: lr 0.01; 10 layers / 1000 epochs for regression,
    /// 20 layers / 5000 epochs for classification; 10 runs.
    static TrainConfig defaults(Task task);

    [[nodiscard]] LossKind loss() const {
        return is_classification(task) ? LossKind::CCE : LossKind::MSE;
    }
    [[nodiscard]] CircuitFamily family() const {
        return is_classification(task) ? CircuitFamily::Classification
                                       : CircuitFamily::Regression;
    }
    /// Seeds of the repeated runs, in run order.
    [[nodiscard]] std::vector<std::uint64_t> run_seed_list() const;
    void validate() const;

    bool operator==(const TrainConfig &) const = default;
};

struct FinalMetrics {
    double train_loss{0.0};
    double test_loss{0.0};
    double train_accuracy{0.0}; ///< classification only
    double test_accuracy{0.0};

    bool operator==(const FinalMetrics &) const = default;
};

struct TrainRun {
    TrainConfig config;
    std::uint64_t seed{0};
    std::vector<double> train_loss; ///< epochs + 1 entries, [0] = before training
    std::vector<double> test_loss;
    std::vector<double> train_accuracy; ///< empty for regression
    std::vector<double> test_accuracy;
    std::vector<double> initial_params;
    std::vector<double> final_params; ///< as trained, before any rescaling
    FinalMetrics final_metrics;       ///< after rescaling, when configured
    double seconds{0.0};

    bool operator==(const TrainRun &) const = default;
};

/// Called with every sampled mask (epoch stamped) before it is used.
using MaskObserver = std::function<void(const DropoutMask &)>;

/// Metrics of `params` on the unmasked circuit.
FinalMetrics evaluate_params(const CircuitTemplate &tmpl,
                             const PreparedDataset &data, LossKind loss,
                             std::span<const double> params);

/// Applies the per-slot (1 - p_i)^(1/k) rescaling, p_i being each slot's
/// marginal drop probability under `dropout`.
std::vector<double> rescale_for_dropout(const CircuitTemplate &tmpl,
                                        const DropoutConfig &dropout,
                                        std::span<const double> params,
                                        double k);

TrainRun train(const TrainConfig &config, const PreparedDataset &data,
               std::uint64_t seed, const MaskObserver &observer = {});

struct MetricStats {
    double mean{0.0};
    double std{0.0}; ///< population standard deviation
};

MetricStats mean_std(std::span<const double> values);

struct Aggregate {
    DropoutConfig dropout;
    double k{kNoRescale};
    MetricStats train_loss;
    MetricStats test_loss;
    MetricStats train_accuracy;
    MetricStats test_accuracy;
    std::size_t seed_count{0};
};

Aggregate aggregate_runs(std::span<const TrainRun> runs,
                         const DropoutConfig &dropout, double k);

/// One run per seed of run_seed_list(), distributed over workers.
std::vector<TrainRun> run_seeds(const TrainConfig &config,
                                const PreparedDataset &data);

Aggregate multi_run(const TrainConfig &config, const PreparedDataset &data);

struct GridSpec {
    std::vector<double> p_layer;
    std::vector<double> p_gate; ///< p_R or p_E for single-rate strategies
    std::vector<double> p_rot;  ///< independent strategy only
    std::vector<double> p_ent;  ///< independent strategy only
};

/// Grid cells whose combined drop probability stays within the
/// overparametrization budget of the template.
std::vector<DropoutConfig> grid_cells(const TrainConfig &base,
                                      const GridSpec &grid);

/// Ranked by mean test loss (ascending).
std::vector<Aggregate> grid_search(const TrainConfig &base,
                                   const PreparedDataset &data,
                                   const GridSpec &grid);

} // namespace qdrop
