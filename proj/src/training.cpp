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
#include "qdrop/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qdrop/circuits.hpp"
#include "qdrop/error.hpp"
#include "qdrop/gradients.hpp"
#include "qdrop/parallel.hpp"

namespace qdrop {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    QDROP_ABORT_IF(a.empty(), "loss of an empty sample set");
    QDROP_ABORT_IF(a.size() != b.size(), "prediction/target length mismatch");
}

std::vector<double> probabilities(std::span<const double> outputs) {
    std::vector<double> p(outputs.size());
    std::transform(outputs.begin(), outputs.end(), p.begin(),
                   class_probability);
    return p;
}

} // namespace

double mse_loss(std::span<const double> predictions,
                std::span<const double> targets) {
    check_pair(predictions, targets);
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

double cce_loss(std::span<const double> class1_probabilities,
                std::span<const double> labels) {
    check_pair(class1_probabilities, labels);
    double acc = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(class1_probabilities[i], kProbabilityClamp,
                                    1.0 - kProbabilityClamp);
        acc -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
    }
    return acc / static_cast<double>(labels.size());
}

double accuracy(std::span<const double> class1_probabilities,
                std::span<const double> labels) {
    check_pair(class1_probabilities, labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double predicted = class1_probabilities[i] >= 0.5 ? 1.0 : 0.0;
        hits += predicted == labels[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, double learning_rate,
               std::span<const char> active) {
    const std::size_t n = params.size();
    QDROP_ABORT_IF(grads.size() != n || state.m.size() != n ||
                       state.v.size() != n || state.steps.size() != n,
                   "Adam dimension mismatch");
    QDROP_ABORT_IF(!active.empty() && active.size() != n,
                   "Adam activity mask has the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!active.empty() && active[i] == 0) {
            continue;
        }
        const double g = grads[i];
        state.m[i] = kAdamBeta1 * state.m[i] + (1.0 - kAdamBeta1) * g;
        state.v[i] = kAdamBeta2 * state.v[i] + (1.0 - kAdamBeta2) * g * g;
        const auto t = static_cast<double>(++state.steps[i]);
        const double m_hat = state.m[i] / (1.0 - std::pow(kAdamBeta1, t));
        const double v_hat = state.v[i] / (1.0 - std::pow(kAdamBeta2, t));
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }
}

PreparedBatch::PreparedBatch(CircuitTemplate tmpl, std::vector<Sample> samples)
    : tmpl_(std::move(tmpl)), samples_(std::move(samples)) {
    embedding_.reserve(samples_.size());
    for (const auto &s : samples_) {
        embedding_.push_back(embedding_half_angles(tmpl_, s.x));
    }
}

std::vector<double> PreparedBatch::targets() const {
    std::vector<double> y;
    for (const auto &s : samples_) {
        y.push_back(s.y);
    }
    return y;
}

std::vector<double> PreparedBatch::outputs(std::span<const double> params,
                                           const DropoutMask &mask) const {
    QDROP_ABORT_IF(params.size() != tmpl_.parameter_count(),
                   "parameter count mismatch");
    const auto slots = slot_half_angles(params);
    std::vector<double> out;
    out.reserve(samples_.size());
    std::vector<HalfAngle> table;
    for (const auto &emb : embedding_) {
        table = emb;
        bind_slots(tmpl_, slots, table);
        out.push_back(evaluate_output(tmpl_, table, mask));
    }
    return out;
}

std::vector<double> PreparedBatch::gradient(std::span<const double> params,
                                            const DropoutMask &mask,
                                            LossKind loss) const {
    QDROP_ABORT_IF(params.size() != tmpl_.parameter_count(),
                   "parameter count mismatch");
    QDROP_ABORT_IF(samples_.empty(), "gradient of an empty batch");
    const auto slots = slot_half_angles(params);
    const double scale = 1.0 / static_cast<double>(samples_.size());
    std::vector<double> grad(params.size(), 0.0);
    std::vector<HalfAngle> table;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        table = embedding_[i];
        bind_slots(tmpl_, slots, table);
        const double y = samples_[i].y;
        accumulate_output_gradient(
            tmpl_, table, mask,
            [&](double f) { return scale * sample_loss_derivative(loss, f, y); },
            grad);
    }
    return grad;
}

TrainConfig TrainConfig::defaults(Task task) {
    TrainConfig c;
    c.task = task;
    if (is_classification(task)) {
        c.n_layers = 20;
        c.epochs = 5000;
    }
    return c;
}

std::vector<std::uint64_t> TrainConfig::run_seed_list() const {
    if (!seeds.empty()) {
        return seeds;
    }
    std::vector<std::uint64_t> out(n_runs);
    for (std::size_t i = 0; i < n_runs; ++i) {
        out[i] = base_seed + i;
    }
    return out;
}

void TrainConfig::validate() const {
    QDROP_ABORT_IF(n_layers < 1, "n_layers must be >= 1");
    QDROP_ABORT_IF(!(learning_rate >= 0.0), "learning rate must be >= 0");
    QDROP_ABORT_IF(n_runs < 1, "n_runs must be >= 1");
    QDROP_ABORT_IF(rescale_k && !(*rescale_k > 0.0),
                   "rescale k must be positive");
    dropout.validate();
}

FinalMetrics evaluate_params(const CircuitTemplate &tmpl,
                             const PreparedDataset &data, LossKind loss,
                             std::span<const double> params) {
    const PreparedBatch train_set(tmpl, data.train_samples());
    const PreparedBatch test_set(tmpl, data.test_samples());
    FinalMetrics m;
    const auto f_train = train_set.outputs(params);
    const auto f_test = test_set.outputs(params);
    if (loss == LossKind::MSE) {
        m.train_loss = mse_loss(f_train, train_set.targets());
        m.test_loss = mse_loss(f_test, test_set.targets());
    } else {
        const auto p_train = probabilities(f_train);
        const auto p_test = probabilities(f_test);
        m.train_loss = cce_loss(p_train, train_set.targets());
        m.test_loss = cce_loss(p_test, test_set.targets());
        m.train_accuracy = accuracy(p_train, train_set.targets());
        m.test_accuracy = accuracy(p_test, test_set.targets());
    }
    return m;
}

std::vector<double> rescale_for_dropout(const CircuitTemplate &tmpl,
                                        const DropoutConfig &dropout,
                                        std::span<const double> params,
                                        double k) {
    const auto probs = slot_drop_probabilities(tmpl, dropout);
    QDROP_ABORT_IF(params.size() != probs.size(), "parameter count mismatch");
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out[i] = rescale_params(params.subspan(i, 1), probs[i], k).front();
    }
    return out;
}

TrainRun train(const TrainConfig &config, const PreparedDataset &data,
               std::uint64_t seed, const MaskObserver &observer) {
    config.validate();
    QDROP_ABORT_IF(data.task != config.task,
                   std::string("dataset prepared for task ") +
                       task_name(data.task) + ", config asks for " +
                       task_name(config.task));
    const auto start = std::chrono::steady_clock::now();
    const auto tmpl =
        build_family(config.family(), config.n_qubits, config.n_layers);
    const PreparedBatch train_set(tmpl, data.train_samples());
    const PreparedBatch test_set(tmpl, data.test_samples());
    const auto train_y = train_set.targets();
    const auto test_y = test_set.targets();
    const LossKind loss = config.loss();
    const bool classify = loss == LossKind::CCE;

    TrainRun run;
    run.config = config;
    run.seed = seed;

    Rng rng(seed);
    std::uniform_real_distribution<double> init(0.0, 2.0 * std::numbers::pi);
    std::vector<double> params(tmpl.parameter_count());
    for (auto &p : params) {
        p = init(rng);
    }
    run.initial_params = params;

    auto record = [&](std::span<const double> theta) {
        const auto f_train = train_set.outputs(theta);
        const auto f_test = test_set.outputs(theta);
        if (!classify) {
            run.train_loss.push_back(mse_loss(f_train, train_y));
            run.test_loss.push_back(mse_loss(f_test, test_y));
            return;
        }
        const auto p_train = probabilities(f_train);
        const auto p_test = probabilities(f_test);
        run.train_loss.push_back(cce_loss(p_train, train_y));
        run.test_loss.push_back(cce_loss(p_test, test_y));
        run.train_accuracy.push_back(accuracy(p_train, train_y));
        run.test_accuracy.push_back(accuracy(p_test, test_y));
    };

    run.train_loss.reserve(config.epochs + 1);
    run.test_loss.reserve(config.epochs + 1);
    record(params);

    AdamState adam(params.size());
    std::vector<char> active(params.size(), 1);
    const bool dropping = config.dropout.strategy != Strategy::None;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        DropoutMask mask = sample_mask(tmpl, config.dropout, rng);
        mask.epoch = static_cast<int>(epoch);
        if (observer) {
            observer(mask);
        }
        const auto grad = train_set.gradient(params, mask, loss);
        if (dropping && config.adam_skip_dropped) {
            for (std::size_t s = 0; s < params.size(); ++s) {
                active[s] = mask.contains(tmpl.slot_gate(s)) ? 0 : 1;
            }
            adam_step(params, grad, adam, config.learning_rate, active);
        } else {
            adam_step(params, grad, adam, config.learning_rate);
        }
        record(params);
    }
    run.final_params = params;

    std::vector<double> deployed = params;
    if (config.rescale_k) {
        deployed =
            rescale_for_dropout(tmpl, config.dropout, params, *config.rescale_k);
    }
    run.final_metrics = evaluate_params(tmpl, data, loss, deployed);
    run.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return run;
}

MetricStats mean_std(std::span<const double> values) {
    QDROP_ABORT_IF(values.empty(), "statistics of an empty set");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(var / n)};
}

Aggregate aggregate_runs(std::span<const TrainRun> runs,
                         const DropoutConfig &dropout, double k) {
    QDROP_ABORT_IF(runs.empty(), "no runs to aggregate");
    std::vector<double> tr, te, tra, tea;
    for (const auto &r : runs) {
        tr.push_back(r.final_metrics.train_loss);
        te.push_back(r.final_metrics.test_loss);
        tra.push_back(r.final_metrics.train_accuracy);
        tea.push_back(r.final_metrics.test_accuracy);
    }
    Aggregate a;
    a.dropout = dropout;
    a.k = k;
    a.train_loss = mean_std(tr);
    a.test_loss = mean_std(te);
    a.train_accuracy = mean_std(tra);
    a.test_accuracy = mean_std(tea);
    a.seed_count = runs.size();
    return a;
}

std::vector<TrainRun> run_seeds(const TrainConfig &config,
                                const PreparedDataset &data) {
    config.validate();
    const auto seed_list = config.run_seed_list();
    std::vector<TrainRun> runs(seed_list.size());
    parallel_for(seed_list.size(), [&](std::size_t i) {
        runs[i] = train(config, data, seed_list[i]);
    });
    return runs;
}

Aggregate multi_run(const TrainConfig &config, const PreparedDataset &data) {
    const auto runs = run_seeds(config, data);
    return aggregate_runs(runs, config.dropout,
                          config.rescale_k.value_or(kNoRescale));
}

std::vector<DropoutConfig> grid_cells(const TrainConfig &base,
                                      const GridSpec &grid) {
    const Strategy s = base.dropout.strategy;
    QDROP_ABORT_IF(s == Strategy::None, "grid search needs a dropout strategy");
    QDROP_ABORT_IF(grid.p_layer.empty(), "empty p_L grid");
    const auto tmpl = build_family(base.family(), base.n_qubits, base.n_layers);
    const auto budget =
        max_drop_params(tmpl.parameter_count(), tmpl.n_qubits());

    std::vector<DropoutConfig> cells;
    auto consider = [&](DropoutConfig c) {
        c.validate();
        if (c.combined_probability() <= budget.max_fraction + 1e-12) {
            cells.push_back(c);
        }
    };
    for (double pl : grid.p_layer) {
        if (s == Strategy::Independent) {
            QDROP_ABORT_IF(grid.p_rot.empty() || grid.p_ent.empty(),
                           "independent grid needs p_R and p_E values");
            for (double pr : grid.p_rot) {
                for (double pe : grid.p_ent) {
                    consider({s, pl, pr, pe});
                }
            }
        } else {
            QDROP_ABORT_IF(grid.p_gate.empty(), "empty p_G grid");
            for (double pg : grid.p_gate) {
                if (s == Strategy::Entangling) {
                    consider({s, pl, 0.0, pg});
                } else {
                    consider({s, pl, pg, 0.0});
                }
            }
        }
    }
    QDROP_ABORT_IF(cells.empty(),
                   "no grid cell satisfies the drop budget p_L*p_G <= " +
                       std::to_string(budget.max_fraction) +
                       " (M_drop_max = " + std::to_string(budget.max_dropped) +
                       " of M = " + std::to_string(tmpl.parameter_count()) +
                       ")");
    return cells;
}

std::vector<Aggregate> grid_search(const TrainConfig &base,
                                   const PreparedDataset &data,
                                   const GridSpec &grid) {
    base.validate();
    const auto cells = grid_cells(base, grid);
    const auto seed_list = base.run_seed_list();
    const std::size_t runs_per_cell = seed_list.size();
    std::vector<TrainRun> runs(cells.size() * runs_per_cell);
    parallel_for(runs.size(), [&](std::size_t job) {
        TrainConfig cfg = base;
        cfg.dropout = cells[job / runs_per_cell];
        runs[job] = train(cfg, data, seed_list[job % runs_per_cell]);
    });
    std::vector<Aggregate> table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        table.push_back(aggregate_runs(
            std::span(runs).subspan(c * runs_per_cell, runs_per_cell),
            cells[c], base.rescale_k.value_or(kNoRescale)));
    }
    std::stable_sort(table.begin(), table.end(),
                     [](const Aggregate &a, const Aggregate &b) {
                         return a.test_loss.mean < b.test_loss.mean;
                     });
    return table;
}

} // namespace qdrop
