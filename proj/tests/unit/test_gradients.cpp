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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "catch_amalgamated.hpp"

#include "qdrop/circuits.hpp"
#include "qdrop/error.hpp"
#include "qdrop/gradients.hpp"
#include "support/oracles.hpp"
#include "support/random_circuits.hpp"

using namespace qdrop;
using Catch::Approx;
using std::numbers::pi;

namespace {

CircuitTemplate single(std::vector<GateKind> kinds) {
    std::vector<PlacedGate> gates;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        gates.push_back({{kinds[i], 0, {}, ParamSlot{i}}, i, 0, i,
                         GateRole::Rotation});
    }
    return CircuitTemplate(1, 0, 1, CircuitFamily::Custom, std::move(gates));
}

bool close(double a, double b, double rel = 1e-5, double floor = 1e-8) {
    return std::abs(a - b) <= std::max(floor, rel * std::max(std::abs(a), std::abs(b)));
}

} // namespace

TEST_CASE("single-qubit gradient examples", "[gradients]") {
    const auto t = single({GateKind::Ry});
    const std::vector<Sample> batch{{{}, 1.0}};
    const std::vector<double> zero{0.0};
    CHECK(gradient(t, zero, {}, batch, LossKind::MSE)[0] == Approx(0.0).margin(1e-15));
    const std::vector<double> half{pi / 2};
    CHECK(output_gradient(t, half, {}, {})[0] == Approx(-1.0));
    CHECK(output_gradient_parameter_shift(t, half, {}, {})[0] == Approx(-1.0));
    const auto fd = oracle::central_difference(
        [&](std::span<const double> p) { return oracle::output(t, p, {}, {}); },
        half);
    CHECK(fd[0] == Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("dropped slots have exactly zero gradient", "[gradients]") {
    const auto t = build_regression_qnn(3, 2);
    Rng rng(6);
    const auto params = testing_support::random_angles(t.parameter_count(), rng);
    const std::vector<Sample> batch{{{0.3}, 0.1}, {{-0.7}, -0.4}};
    for (int trial = 0; trial < 10; ++trial) {
        const auto mask = testing_support::random_mask(t, 0.4, rng);
        const auto g = gradient(t, params, mask, batch, LossKind::MSE);
        for (std::size_t s = 0; s < g.size(); ++s) {
            if (mask.contains(t.slot_gate(s))) {
                CHECK(g[s] == 0.0);
            }
        }
    }
}

TEST_CASE("adjoint, parameter-shift and finite differences agree",
          "[gradients][oracle][property]") {
    Rng rng(2024);
    std::uniform_real_distribution<double> xs(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto t = testing_support::random_template(n, 1 + (trial / 3) % 3, rng);
        const auto params = testing_support::random_angles(t.parameter_count(), rng);
        const auto mask = testing_support::random_mask(t, 0.25, rng);
        const std::vector<double> x{xs(rng)};
        const auto adj = output_gradient(t, params, mask, x);
        const auto ps = output_gradient_parameter_shift(t, params, mask, x);
        const auto fd = oracle::central_difference(
            [&](std::span<const double> p) { return oracle::output(t, p, mask, x); },
            params);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            CAPTURE(trial, i, adj[i], ps[i], fd[i]);
            CHECK(close(adj[i], ps[i]));
            CHECK(close(adj[i], fd[i]));
            CHECK(close(ps[i], fd[i]));
        }
    }
}

TEST_CASE("loss gradients match finite differences of the mean loss",
          "[gradients][oracle]") {
    Rng rng(77);
    for (auto loss : {LossKind::MSE, LossKind::CCE}) {
        const auto t = loss == LossKind::MSE ? build_regression_qnn(3, 2)
                                             : build_classification_qnn(3, 2);
        const auto params = testing_support::random_angles(t.parameter_count(), rng);
        std::vector<Sample> batch;
        if (loss == LossKind::MSE) {
            batch = {{{0.2}, 0.5}, {{-0.9}, -0.3}, {{0.6}, 0.0}};
        } else {
            batch = {{{0.2, -1.1}, 1.0}, {{1.5, 0.4}, 0.0}, {{-0.6, 0.9}, 1.0}};
        }
        const auto mask = testing_support::random_mask(t, 0.2, rng);
        const auto adj = gradient(t, params, mask, batch, loss);
        const auto ps = gradient_parameter_shift(t, params, mask, batch, loss);
        const auto fd = oracle::central_difference(
            [&](std::span<const double> p) {
                double total = 0.0;
                for (const auto &s : batch) {
                    total += sample_loss(loss, oracle::output(t, p, mask, s.x), s.y);
                }
                return total / static_cast<double>(batch.size());
            },
            params);
        for (std::size_t i = 0; i < adj.size(); ++i) {
            CHECK(close(adj[i], fd[i]));
            CHECK(close(adj[i], ps[i]));
        }
    }
    const auto t = build_regression_qnn(3, 1);
    const std::vector<Sample> empty;
    CHECK_THROWS_AS(
        gradient(t, std::vector<double>(t.parameter_count()), {}, empty, LossKind::MSE),
        Error);
}

TEST_CASE("QFIM examples", "[gradients]") {
    const std::vector<double> theta{0.37};
    const auto ry = qfim(single({GateKind::Ry}), theta, {});
    CHECK(ry.matrix(0, 0) == Approx(1.0));
    CHECK(ry.rank == 1);

    const std::vector<double> two{0.4, -1.2};
    const auto rz = qfim(single({GateKind::Rz, GateKind::Rz}), two, {});
    CHECK(rz.matrix.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(rz.rank == 0);

    const auto t = build_regression_qnn(5, 3);
    Rng rng(12);
    const auto params = testing_support::random_angles(t.parameter_count(), rng);
    const std::vector<double> one{1.0};
    const auto rep = qfim(t, params, one);
    std::size_t first_block = 0;
    for (std::size_t s = 0; s < t.parameter_count(); ++s) {
        const auto &g = t.gate(t.slot_gate(s));
        if (g.layer == 0 && g.sublayer == 2) {
            ++first_block;
            CHECK(rep.matrix.row(static_cast<Eigen::Index>(s)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(rep.matrix.col(static_cast<Eigen::Index>(s)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    CHECK(first_block == 5);
}

TEST_CASE("QFIM matches the fidelity finite-difference oracle",
          "[gradients][oracle]") {
    Rng rng(31);
    const auto t = testing_support::random_template(3, 2, rng);
    const auto params = testing_support::random_angles(t.parameter_count(), rng);
    const std::vector<double> x{0.25};
    const auto rep = qfim(t, params, x);
    const auto psi = oracle::run(t, params, {}, x);
    const double h = 1e-4;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto shifted = params;
        shifted[i] += h;
        const double f = std::norm(psi.dot(oracle::run(t, shifted, {}, x)));
        CHECK(rep.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) ==
              Approx(4.0 * (1.0 - f) / (h * h)).margin(1e-5));
    }
}

TEST_CASE("QFIM invariants", "[gradients][property]") {
    Rng rng(41);
    std::uniform_real_distribution<double> xs(-1, 1);
    for (int trial = 0; trial < 12; ++trial) {
        const auto t = build_regression_qnn(5, 1 + trial % 6);
        const auto params = testing_support::random_angles(t.parameter_count(), rng);
        const std::vector<double> x{xs(rng)};
        const auto rep = qfim(t, params, x);
        const auto &F = rep.matrix;
        CHECK((F - F.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(F);
        CHECK(eig.eigenvalues().minCoeff() > -1e-9);
        CHECK(rep.rank <= std::min<std::size_t>(t.parameter_count(), 62));

        // permuting the slots is a similarity transform
        std::vector<int> perm(t.parameter_count());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> P(
            Eigen::Map<Eigen::VectorXi>(perm.data(), static_cast<Eigen::Index>(perm.size())));
        const Eigen::MatrixXd permuted = P * F * P.transpose();
        CHECK(qfim_rank(permuted) == rep.rank);
    }
}

TEST_CASE("qfim_rank examples", "[gradients]") {
    CHECK(qfim_rank(Eigen::MatrixXd::Zero(4, 4)) == 0);
    CHECK(qfim_rank(Eigen::MatrixXd::Identity(5, 5)) == 5);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = 1e-9;
    CHECK(qfim_rank(d) == 2);
    CHECK(qfim_rank(d, 1e-7) == 1);
    d(1, 1) = 1e-11;
    CHECK(qfim_rank(d) == 1);
    CHECK_THROWS_AS(qfim_rank(Eigen::MatrixXd::Zero(2, 3)), Error);
}
