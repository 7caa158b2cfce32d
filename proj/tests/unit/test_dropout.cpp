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
#include <map>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"

#include "qdrop/circuits.hpp"
#include "qdrop/dropout.hpp"
#include "qdrop/error.hpp"

using namespace qdrop;
using Catch::Approx;

namespace {

/// Exact per-gate drop marginals of a one-layer template, by enumerating every
/// outcome of the gate-level coin flips given that the layer is selected.
std::vector<double> enumerate_marginals(const CircuitTemplate &t,
                                        const DropoutConfig &c) {
    std::vector<std::size_t> candidates;
    for (const auto &g : t.gates()) {
        const bool rot = g.role == GateRole::Rotation &&
                         c.strategy != Strategy::Entangling;
        const bool ent = g.role == GateRole::Entangling &&
                         (c.strategy == Strategy::Entangling ||
                          c.strategy == Strategy::Independent);
        if (rot || ent) {
            candidates.push_back(g.id);
        }
    }
    const bool canonical = c.strategy == Strategy::Canonical ||
                           c.strategy == Strategy::CanonicalForward;
    std::vector<double> marginal(t.gate_count(), 0.0);
    for (std::size_t outcome = 0; outcome < (std::size_t{1} << candidates.size());
         ++outcome) {
        double weight = c.p_layer;
        std::set<std::size_t> dropped;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            const auto &g = t.gate(candidates[k]);
            const double p = g.role == GateRole::Rotation ? c.p_rot : c.p_ent;
            const bool hit = (outcome >> k) & 1U;
            weight *= hit ? p : 1.0 - p;
            if (!hit) {
                continue;
            }
            dropped.insert(g.id);
            if (!canonical) {
                continue;
            }
            const std::size_t q = g.gate.target;
            for (const auto &e : t.gates()) {
                if (e.role != GateRole::Entangling) {
                    continue;
                }
                if (e.id > g.id && *e.gate.control == q) {
                    dropped.insert(e.id);
                }
                if (c.strategy == Strategy::Canonical && e.id < g.id &&
                    e.gate.target == q) {
                    dropped.insert(e.id);
                }
            }
        }
        for (auto id : dropped) {
            marginal[id] += weight;
        }
    }
    return marginal;
}

std::vector<double> empirical(const CircuitTemplate &t, const DropoutConfig &c,
                              std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> freq(t.gate_count(), 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        for (auto id : sample_mask(t, c, rng).ids()) {
            freq[id] += 1.0;
        }
    }
    for (auto &f : freq) {
        f /= static_cast<double>(samples);
    }
    return freq;
}

} // namespace

TEST_CASE("drop_probability examples", "[dropout]") {
    CHECK(drop_probability(0.7, 0.7) == Approx(0.49));
    CHECK(drop_probability(0.3, 0.0) == 0.0);
    CHECK(drop_probability(1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(drop_probability(1.2, 0.5), Error);
    CHECK_THROWS_AS(drop_probability(0.2, -0.1), Error);
}

TEST_CASE("max_drop_params examples", "[dropout]") {
    auto b = max_drop_params(150, 5);
    CHECK(b.max_dropped == 88);
    CHECK(b.max_fraction == Approx(88.0 / 150.0));
    b = max_drop_params(180, 5);
    CHECK(b.max_dropped == 118);
    CHECK(b.max_fraction == Approx(118.0 / 180.0));
    b = max_drop_params(62, 5);
    CHECK(b.max_dropped == 0);
    CHECK(b.max_fraction == 0.0);
    CHECK(max_drop_params(10, 5).max_dropped == 0);
    CHECK(max_parameter_dimension(5) == 62);
}

TEST_CASE("DropoutConfig validation", "[dropout]") {
    CHECK_NOTHROW(DropoutConfig{Strategy::Rotation, 0.5, 0.5, 0.0}.validate());
    CHECK_THROWS_AS((DropoutConfig{Strategy::Rotation, 0.5, 0.5, 0.2}.validate()),
                    Error);
    CHECK_THROWS_AS((DropoutConfig{Strategy::Entangling, 0.5, 0.5, 0.0}.validate()),
                    Error);
    CHECK_THROWS_AS((DropoutConfig{Strategy::None, 0.5, 0.0, 0.0}.validate()),
                    Error);
    CHECK_THROWS_AS((DropoutConfig{Strategy::Independent, 1.5, 0.1, 0.1}.validate()),
                    Error);
    for (auto s : {Strategy::None, Strategy::Canonical, Strategy::CanonicalForward,
                   Strategy::Rotation, Strategy::Entangling, Strategy::Independent}) {
        CHECK(strategy_from_name(strategy_name(s)) == s);
    }
    CHECK_THROWS_AS(strategy_from_name("backward"), Error);
}

TEST_CASE("sample_mask examples", "[dropout]") {
    const auto t = build_regression_qnn(5, 3);
    Rng rng(4);
    SECTION("p_L = 0 gives empty masks") {
        for (auto s : {Strategy::Rotation, Strategy::Canonical, Strategy::Independent}) {
            DropoutConfig c{s, 0.0, 0.9, s == Strategy::Independent ? 0.9 : 0.0};
            for (int i = 0; i < 20; ++i) {
                CHECK(sample_mask(t, c, rng).empty());
            }
        }
    }
    SECTION("saturated rotation drops every rotation and nothing else") {
        const auto m = sample_mask(t, {Strategy::Rotation, 1.0, 1.0, 0.0}, rng);
        for (const auto &g : t.gates()) {
            CHECK(m.contains(g.id) == (g.role == GateRole::Rotation));
        }
    }
    SECTION("masks never contain embedding gates") {
        for (auto s : {Strategy::Canonical, Strategy::CanonicalForward,
                       Strategy::Independent}) {
            DropoutConfig c{s, 1.0, 1.0, s == Strategy::Independent ? 1.0 : 0.0};
            const auto m = sample_mask(t, c, rng);
            for (auto id : m.ids()) {
                CHECK(t.gate(id).role != GateRole::Embedding);
            }
        }
    }
    SECTION("strategy none never consumes randomness") {
        Rng a(1), b(1);
        const auto m = sample_mask(t, {}, a);
        CHECK(m.empty());
        CHECK(a() == b());
    }
}

TEST_CASE("canonical masks contain canonical-forward masks",
          "[dropout][property]") {
    const auto t = build_regression_qnn(5, 4);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng a(seed), b(seed);
        const auto full = sample_mask(t, {Strategy::Canonical, 0.6, 0.4, 0.0}, a);
        const auto fwd =
            sample_mask(t, {Strategy::CanonicalForward, 0.6, 0.4, 0.0}, b);
        for (auto id : fwd.ids()) {
            CHECK(full.contains(id));
        }
    }
}

TEST_CASE("mask marginals match exact enumeration on one layer",
          "[dropout][oracle]") {
    const auto reg = build_regression_qnn(5, 1);
    const auto cls = build_classification_qnn(5, 1);
    const auto small = build_regression_qnn(3, 1);
    const std::vector<std::pair<const CircuitTemplate *, DropoutConfig>> cases{
        {&reg, {Strategy::Rotation, 0.7, 0.4, 0.0}},
        {&reg, {Strategy::Entangling, 0.5, 0.0, 0.6}},
        {&small, {Strategy::Independent, 0.6, 0.3, 0.5}},
        {&reg, {Strategy::Canonical, 0.8, 0.3, 0.0}},
        {&reg, {Strategy::CanonicalForward, 0.8, 0.3, 0.0}},
        {&cls, {Strategy::Canonical, 0.7, 0.5, 0.0}},
        {&cls, {Strategy::Entangling, 0.4, 0.0, 0.5}},
    };
    const std::size_t samples = 40000;
    for (const auto &[t, c] : cases) {
        const auto exact = enumerate_marginals(*t, c);
        const auto mc = empirical(*t, c, samples, 99);
        const auto slots = slot_drop_probabilities(*t, c);
        for (std::size_t id = 0; id < t->gate_count(); ++id) {
            const double p = exact[id];
            const double sigma =
                std::sqrt(std::max(p * (1 - p), 1e-12) / samples);
            CAPTURE(strategy_name(c.strategy), id);
            CHECK(std::abs(mc[id] - p) <= 4 * sigma + 1e-12);
        }
        for (std::size_t s = 0; s < t->parameter_count(); ++s) {
            CHECK(slots[s] == Approx(exact[t->slot_gate(s)]).margin(1e-12));
        }
    }
}

TEST_CASE("expected dropped parameters stay inside the budget",
          "[dropout][property]") {
    const auto t = build_regression_qnn(5, 10);
    const auto budget = max_drop_params(150, 5);
    DropoutConfig c{Strategy::Rotation, 0.7, 0.8, 0.0};
    REQUIRE(c.combined_probability() <= budget.max_fraction);
    Rng rng(8);
    double total = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        total += static_cast<double>(sample_mask(t, c, rng).size());
    }
    CHECK(total / n < static_cast<double>(budget.max_dropped));
}

TEST_CASE("rescale_params examples", "[dropout]") {
    const std::vector<double> params{2.0, -1.0, 0.5};
    CHECK(rescale_params(params, 0.3, kNoRescale) == params);
    CHECK(rescale_params(params, 1.0, kNoRescale) == params);
    CHECK(rescale_params(params, 0.0, 3.0) == params);
    const std::vector<double> two{2.0};
    CHECK(rescale_params(two, 0.5, 1.0)[0] == Approx(1.0));
    CHECK(rescale_params(two, 0.19, 2.0)[0] == Approx(2.0 * 0.9));
    CHECK_THROWS_AS(rescale_params(two, 1.0, 2.0), Error);
    CHECK_THROWS_AS(rescale_params(two, 0.5, 0.0), Error);
    CHECK_THROWS_AS(rescale_params(two, 0.5, -1.0), Error);
}
