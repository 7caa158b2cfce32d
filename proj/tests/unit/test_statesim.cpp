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
#include <complex>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"

#include "qdrop/error.hpp"
#include "qdrop/statesim.hpp"
#include "support/oracles.hpp"

using namespace qdrop;
using Catch::Approx;
using std::numbers::pi;

namespace {

StateVector basis(std::size_t n, std::size_t index) {
    std::vector<Complex> a(std::size_t{1} << n);
    a[index] = 1.0;
    return StateVector::from_amplitudes(std::move(a));
}

StateVector bell() {
    const double r = 1 / std::sqrt(2.0);
    return StateVector::from_amplitudes({r, 0, 0, r});
}

StateVector ghz3() {
    const double r = 1 / std::sqrt(2.0);
    return StateVector::from_amplitudes({r, 0, 0, 0, 0, 0, 0, r});
}

Gate random_gate(std::size_t n, Rng &rng) {
    std::uniform_int_distribution<int> kind(0, n == 1 ? 2 : 4);
    std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
    Gate g;
    g.kind = static_cast<GateKind>(kind(rng));
    g.target = qubit(rng);
    if (is_controlled(g.kind)) {
        std::size_t c = qubit(rng);
        while (c == g.target) {
            c = qubit(rng);
        }
        g.control = c;
    }
    return g;
}

} // namespace

TEST_CASE("StateVector starts in |0...0> and validates amplitudes",
          "[statesim]") {
    StateVector s(3);
    REQUIRE(s.dim() == 8);
    CHECK(s.amplitudes()[0] == Complex(1.0, 0.0));
    CHECK(s.norm_squared() == Approx(1.0));
    CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(StateVector::from_amplitudes({1.0, 1.0}), Error);
    CHECK_THROWS_AS(StateVector(0), Error);
}

TEST_CASE("apply_gate examples", "[statesim]") {
    Rng rng(7);
    const auto psi = oracle::random_state(2, rng);

    SECTION("Rx(0) is the identity") {
        const auto out = apply_gate(psi, {GateKind::Rx, 1, {}, {}}, 0.0);
        for (std::size_t i = 0; i < psi.dim(); ++i) {
            CHECK(std::abs(out.amplitudes()[i] - psi.amplitudes()[i]) < 1e-15);
        }
    }
    SECTION("CNOT flips |10> to |11>") {
        const auto out =
            apply_gate(basis(2, 0b10), {GateKind::CNOT, 1, 0, {}}, {});
        CHECK(std::abs(out.amplitudes()[0b11] - Complex(1.0)) < 1e-15);
    }
    SECTION("Ry(pi/2)|0> is |+>") {
        const auto out = apply_gate(StateVector(1), {GateKind::Ry, 0, {}, {}},
                                    pi / 2);
        const double r = 1 / std::sqrt(2.0);
        CHECK(std::abs(out.amplitudes()[0] - Complex(r)) < 1e-12);
        CHECK(std::abs(out.amplitudes()[1] - Complex(r)) < 1e-12);
    }
    SECTION("angle presence is enforced") {
        CHECK_THROWS_AS(apply_gate(psi, {GateKind::CNOT, 1, 0, {}}, 0.3),
                        Error);
        CHECK_THROWS_AS(apply_gate(psi, {GateKind::Rz, 1, {}, {}}, {}),
                        Error);
        CHECK_THROWS_AS(apply_gate(psi, {GateKind::Rz, 2, {}, {}}, 0.1),
                        Error);
        CHECK_THROWS_AS(apply_gate(psi, {GateKind::CRy, 1, 1, {}}, 0.1),
                        Error);
        CHECK_THROWS_AS(apply_gate(psi, {GateKind::Rx, 0, 1, {}}, 0.1),
                        Error);
    }
}

TEST_CASE("gate kernels match dense matrices", "[statesim][oracle]") {
    Rng rng(11);
    std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto gate = random_gate(n, rng);
        const double theta = angle(rng);
        const auto psi = oracle::random_state(n, rng);
        const std::optional<double> a =
            is_parametrized(gate.kind) ? std::optional(theta) : std::nullopt;
        const auto got = oracle::to_vector(apply_gate(psi, gate, a));
        const oracle::Vector want = oracle::gate_matrix(gate, n, theta) *
                          oracle::to_vector(psi);
        CAPTURE(trial, gate_kind_name(gate.kind), gate.target);
        CHECK((got - want).norm() < 1e-12);
    }
}

TEST_CASE("norm is preserved over 10^4 random gates", "[statesim][property]") {
    Rng rng(3);
    std::uniform_real_distribution<double> angle(-10, 10);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const auto gate = random_gate(n, rng);
        const auto psi = oracle::random_state(n, rng);
        const std::optional<double> a =
            is_parametrized(gate.kind) ? std::optional(angle(rng))
                                       : std::nullopt;
        worst = std::max(worst,
                         std::abs(apply_gate(psi, gate, a).norm_squared() - 1));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("expectation_z examples", "[statesim]") {
    CHECK(expectation_z(StateVector(1), 0) == Approx(1.0));
    CHECK(expectation_z(basis(1, 1), 0) == Approx(-1.0));
    const auto plus =
        apply_gate(StateVector(1), {GateKind::Ry, 0, {}, {}}, pi / 2);
    CHECK(std::abs(expectation_z(plus, 0)) < 1e-15);
    // qubit 0 is the most significant bit
    CHECK(expectation_z(basis(3, 0b100), 0) == Approx(-1.0));
    CHECK(expectation_z(basis(3, 0b100), 2) == Approx(1.0));
    CHECK_THROWS_AS(expectation_z(StateVector(2), 2), Error);
}

TEST_CASE("fidelity examples", "[statesim]") {
    Rng rng(5);
    const auto psi = oracle::random_state(3, rng);
    CHECK(fidelity(psi, psi) == Approx(1.0));
    CHECK(fidelity(StateVector(1), basis(1, 1)) == Approx(0.0).margin(1e-15));
    const auto plus =
        apply_gate(StateVector(1), {GateKind::Ry, 0, {}, {}}, pi / 2);
    CHECK(fidelity(StateVector(1), plus) == Approx(0.5));
    CHECK_THROWS_AS(fidelity(StateVector(1), StateVector(2)), Error);
}

TEST_CASE("subset_purity examples", "[statesim]") {
    const std::vector<std::size_t> q0{0};
    const std::vector<std::size_t> q1{1};
    CHECK(subset_purity(bell(), q0) == Approx(0.5));
    CHECK(subset_purity(ghz3(), q1) == Approx(0.5));
    CHECK(oracle::purity(oracle::to_vector(ghz3()), 3, q1) == Approx(0.5));
    CHECK(subset_purity(bell(), {}) == 1.0);
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK(subset_purity(ghz3(), all) == Approx(1.0));

    // product state
    StateVector prod(4);
    Rng rng(9);
    std::uniform_real_distribution<double> angle(0, 2 * pi);
    for (std::size_t q = 0; q < 4; ++q) {
        prod = apply_gate(prod, {GateKind::Ry, q, {}, {}}, angle(rng));
        prod = apply_gate(prod, {GateKind::Rz, q, {}, {}}, angle(rng));
    }
    for (std::size_t bits = 0; bits < 16; ++bits) {
        std::vector<std::size_t> s;
        for (std::size_t q = 0; q < 4; ++q) {
            if ((bits >> q) & 1U) {
                s.push_back(q);
            }
        }
        CHECK(subset_purity(prod, s) == Approx(1.0).margin(1e-10));
    }
    const std::vector<std::size_t> bad{4};
    CHECK_THROWS_AS(subset_purity(prod, bad), Error);
}

TEST_CASE("subset_purity matches the density-matrix oracle",
          "[statesim][oracle][property]") {
    Rng rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const auto psi = oracle::random_state(n, rng);
        const auto vec = oracle::to_vector(psi);
        const std::size_t bits =
            std::uniform_int_distribution<std::size_t>(1, (1U << n) - 1)(rng);
        std::vector<std::size_t> s;
        std::vector<std::size_t> comp;
        for (std::size_t q = 0; q < n; ++q) {
            (((bits >> q) & 1U) ? s : comp).push_back(q);
        }
        const double p = subset_purity(psi, s);
        CHECK(p == Approx(oracle::purity(vec, n, s)).margin(1e-12));
        CHECK(std::abs(p - subset_purity(psi, comp)) < 1e-10);
        CHECK(p <= 1.0 + 1e-12);
        CHECK(p >= 1.0 / static_cast<double>(1U << s.size()) - 1e-12);
    }
}
