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
#include <cmath>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"

#include "qdrop/circuits.hpp"
#include "qdrop/error.hpp"
#include "qdrop/gradients.hpp"
#include "qdrop/training.hpp"

using namespace qdrop;
using Catch::Approx;

namespace {

TrainConfig small_config(Task task = Task::Sin) {
    TrainConfig c = TrainConfig::defaults(task);
    c.n_layers = 2;
    c.epochs = 30;
    c.n_runs = 3;
    return c;
}

} // namespace

TEST_CASE("loss examples", "[training]") {
    const std::vector<double> a{0.3, -0.2};
    CHECK(mse_loss(a, a) == 0.0);
    CHECK(mse_loss(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 1.0);
    CHECK(mse_loss(std::vector<double>{0.5}, std::vector<double>{0.0}) == 0.25);
    CHECK_THROWS_AS(mse_loss({}, {}), Error);
    CHECK_THROWS_AS(mse_loss(a, std::vector<double>{1.0}), Error);

    const std::vector<double> half(4, 0.5);
    const std::vector<double> labels{0, 1, 1, 0};
    CHECK(cce_loss(half, labels) == Approx(std::log(2.0)));
    CHECK(cce_loss(labels, labels) < 1e-11);
    CHECK(cce_loss(std::vector<double>{0.9}, std::vector<double>{1.0}) ==
          Approx(-std::log(0.9)));
    CHECK_THROWS_AS(cce_loss({}, {}), Error);

    CHECK(accuracy(labels, labels) == 1.0);
    const std::vector<double> inverted{1, 0, 0, 1};
    CHECK(accuracy(inverted, labels) == 0.0);
    CHECK(accuracy(std::vector<double>{0.6, 0.4}, std::vector<double>{1, 1}) == 0.5);
    CHECK_THROWS_AS(accuracy({}, {}), Error);
}

TEST_CASE("adam_step examples", "[training]") {
    std::vector<double> p{0.5, -1.0, 2.0};
    const auto start = p;
    AdamState s(3);
    adam_step(p, std::vector<double>{0, 0, 0}, s, 0.01);
    CHECK(p == start);

    AdamState first(3);
    const std::vector<double> g{3.0, -1e-3, 250.0};
    adam_step(p, g, first, 0.01);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p[i] - start[i] == Approx(-0.01 * std::copysign(1.0, g[i])).margin(1e-6));
    }

    auto q = start;
    AdamState zero_lr(3);
    adam_step(q, g, zero_lr, 0.0);
    CHECK(q == start);

    AdamState partial(3);
    auto r = start;
    const std::vector<char> active{1, 0, 1};
    adam_step(r, g, partial, 0.01, active);
    CHECK(r[1] == start[1]);
    CHECK(partial.steps == std::vector<std::uint64_t>{1, 0, 1});
    CHECK(partial.m[1] == 0.0);

    CHECK_THROWS_AS(adam_step(r, std::vector<double>{1.0}, partial, 0.01), Error);
}

TEST_CASE("train with zero epochs returns the initialization", "[training]") {
    const auto data = make_task_dataset(Task::Sin, 0);
    auto c = small_config();
    c.epochs = 0;
    const auto run = train(c, data, 5);
    CHECK(run.train_loss.size() == 1);
    CHECK(run.test_loss.size() == 1);
    CHECK(run.final_params == run.initial_params);
    for (double p : run.initial_params) {
        CHECK(p >= 0.0);
        CHECK(p < 2 * std::numbers::pi);
    }
}

TEST_CASE("train records epochs + 1 losses and is deterministic",
          "[training][property]") {
    const auto data = make_task_dataset(Task::Sin, 3);
    auto c = small_config();
    c.dropout = {Strategy::Independent, 0.5, 0.3, 0.3};
    auto a = train(c, data, 11);
    auto b = train(c, data, 11);
    CHECK(a.train_loss.size() == c.epochs + 1);
    CHECK(a.test_loss.size() == c.epochs + 1);
    a.seconds = b.seconds = 0.0;
    CHECK(a == b);
    auto other = train(c, data, 12);
    CHECK(other.initial_params != a.initial_params);
}

TEST_CASE("classification runs record accuracies", "[training]") {
    const auto data = make_task_dataset(Task::Moons, 0);
    auto c = small_config(Task::Moons);
    c.epochs = 5;
    const auto run = train(c, data, 1);
    CHECK(run.train_accuracy.size() == 6);
    CHECK(run.test_accuracy.size() == 6);
    CHECK(run.final_metrics.test_accuracy >= 0.0);
    CHECK(run.final_metrics.test_accuracy <= 1.0);
}

TEST_CASE("strategy none equals a plain loop with empty masks",
          "[training][oracle]") {
    const auto data = make_task_dataset(Task::Module, 2);
    auto c = small_config(Task::Module);
    const auto run = train(c, data, 4);

    const auto tmpl = build_regression_qnn(5, c.n_layers);
    const auto batch = data.train_samples();
    auto params = run.initial_params;
    AdamState adam(params.size());
    for (std::size_t e = 0; e < c.epochs; ++e) {
        const auto g = gradient(tmpl, params, {}, batch, LossKind::MSE);
        adam_step(params, g, adam, c.learning_rate);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK(run.final_params[i] == Approx(params[i]).margin(1e-12));
    }
}

TEST_CASE("rescale k = infinity equals no rescaling bit for bit",
          "[training][property]") {
    const auto data = make_task_dataset(Task::Sin, 1);
    auto c = small_config();
    c.dropout = {Strategy::Rotation, 0.4, 0.3, 0.0};
    const auto plain = train(c, data, 9);
    c.rescale_k = kNoRescale;
    const auto inf = train(c, data, 9);
    CHECK(plain.final_metrics == inf.final_metrics);
    c.rescale_k = 1.0;
    const auto scaled = train(c, data, 9);
    CHECK(scaled.final_params == plain.final_params);
    CHECK(scaled.final_metrics.test_loss != plain.final_metrics.test_loss);
}

TEST_CASE("rescale_for_dropout uses per-slot marginals", "[training]") {
    const auto t = build_regression_qnn(5, 1);
    const std::vector<double> ones(15, 1.0);
    const auto out =
        rescale_for_dropout(t, {Strategy::Rotation, 0.5, 0.5, 0.0}, ones, 1.0);
    for (double v : out) {
        CHECK(v == Approx(0.75));
    }
    const auto ent =
        rescale_for_dropout(t, {Strategy::Entangling, 0.5, 0.0, 0.5}, ones, 1.0);
    CHECK(ent == ones);
}

TEST_CASE("training loss decreases under the protocol optimizer",
          "[training][property]") {
    const auto data = make_task_dataset(Task::Sin, 0);
    auto c = small_config();
    c.n_layers = 3;
    c.epochs = 150;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto run = train(c, data, seed);
        CHECK(std::isfinite(run.train_loss.back()));
        CHECK(run.train_loss.back() < run.train_loss.front());
    }
}

TEST_CASE("multi_run statistics", "[training]") {
    const auto data = make_task_dataset(Task::Sin, 0);
    auto c = small_config();
    c.n_runs = 1;
    auto agg = multi_run(c, data);
    CHECK(agg.seed_count == 1);
    CHECK(agg.test_loss.std == 0.0);
    CHECK(agg.train_loss.std == 0.0);

    c.seeds = {4, 4, 4};
    agg = multi_run(c, data);
    CHECK(agg.seed_count == 3);
    CHECK(agg.test_loss.std == 0.0);

    c.seeds = {};
    c.n_runs = 3;
    c.base_seed = 10;
    CHECK(c.run_seed_list() == std::vector<std::uint64_t>{10, 11, 12});
    const auto runs = run_seeds(c, data);
    CHECK(runs[2].seed == 12);

    const std::vector<double> v{1.0, 3.0};
    CHECK(mean_std(v).mean == 2.0);
    CHECK(mean_std(v).std == 1.0);
    CHECK_THROWS_AS(mean_std({}), Error);
}

TEST_CASE("grid cells and search", "[training]") {
    const auto data = make_task_dataset(Task::Sin, 0);
    auto c = small_config();
    c.epochs = 5;
    c.n_runs = 2;
    c.n_layers = 6;
    c.dropout.strategy = Strategy::Rotation;

    GridSpec one{{0.3}, {0.2}, {}, {}};
    const auto table = grid_search(c, data, one);
    REQUIRE(table.size() == 1);
    CHECK(table[0].dropout == DropoutConfig{Strategy::Rotation, 0.3, 0.2, 0.0});
    CHECK(table[0].seed_count == 2);

    GridSpec two{{0.1, 0.2}, {0.1, 0.5}, {}, {}};
    const auto ranked = grid_search(c, data, two);
    REQUIRE(ranked.size() == 4);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[i - 1].test_loss.mean <= ranked[i].test_loss.mean);
    }

    // 2 layers: M = 30 < 62, nothing may be dropped
    auto shallow = c;
    shallow.n_layers = 2;
    CHECK_THROWS_WITH(grid_cells(shallow, one),
                      Catch::Matchers::ContainsSubstring("drop budget"));

    c.n_layers = 10;
    GridSpec full{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7},
                  {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, {}, {}};
    const auto cells = grid_cells(c, full);
    for (const auto &cell : cells) {
        CHECK(cell.p_layer * cell.p_rot <= 88.0 / 150.0 + 1e-12);
    }
    CHECK(cells.size() < 63);
    c.dropout.strategy = Strategy::Independent;
    GridSpec cube{{0.5}, {}, {0.1, 0.2}, {0.3}};
    CHECK(grid_cells(c, cube).size() == 2);
    c.dropout.strategy = Strategy::None;
    CHECK_THROWS_AS(grid_cells(c, one), Error);
}

TEST_CASE("config validation", "[training]") {
    auto c = TrainConfig::defaults(Task::Moons);
    CHECK(c.n_layers == 20);
    CHECK(c.epochs == 5000);
    CHECK(c.learning_rate == 0.01);
    CHECK(c.n_runs == 10);
    const auto r = TrainConfig::defaults(Task::Sin);
    CHECK(r.n_layers == 10);
    CHECK(r.epochs == 1000);
    c.n_layers = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = TrainConfig::defaults(Task::Sin);
    c.rescale_k = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    const auto moons = make_task_dataset(Task::Moons, 0);
    CHECK_THROWS_AS(train(TrainConfig::defaults(Task::Sin), moons, 0), Error);
}
