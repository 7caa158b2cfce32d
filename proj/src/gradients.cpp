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
#include "qdrop/gradients.hpp"

#include <cmath>
#include <numbers>

#include "qdrop/circuits.hpp"
#include "qdrop/error.hpp"

namespace qdrop {

namespace {

inline std::size_t bit_of(std::size_t n, std::size_t q) {
    return std::size_t{1} << (n - 1 - q);
}

/// <bra| G |ket> for the generator G of a parametrized gate.
Complex generator_element(std::span<const Complex> bra,
                          std::span<const Complex> ket, std::size_t n,
                          const Gate &gate) {
    const std::size_t t = bit_of(n, gate.target);
    const std::size_t c = gate.control ? bit_of(n, *gate.control) : 0;
    Complex acc{0.0, 0.0};
    switch (gate.kind) {
    case GateKind::Rx:
        for (std::size_t i = 0; i < ket.size(); ++i) {
            acc += std::conj(bra[i]) * ket[i ^ t];
        }
        break;
    case GateKind::Rz:
        for (std::size_t i = 0; i < ket.size(); ++i) {
            const Complex v = std::conj(bra[i]) * ket[i];
            acc += (i & t) ? -v : v;
        }
        break;
    case GateKind::Ry:
    case GateKind::CRy: {
        // Y|0> = i|1>, Y|1> = -i|0>
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < ket.size(); ++i) {
            if (c != 0 && !(i & c)) {
                continue;
            }
            if (i & t) {
                s += std::conj(bra[i]) * ket[i ^ t];
            } else {
                s -= std::conj(bra[i]) * ket[i ^ t];
            }
        }
        acc = Complex{0.0, 1.0} * s;
        break;
    }
    case GateKind::CNOT:
        abort_with("CNOT has no generator");
    }
    return acc;
}

std::size_t slot_of(const PlacedGate &pg) {
    return std::get<ParamSlot>(pg.gate.angle_source).index;
}

/**
 * Forward pass, then reverse sweep. `weight(f)` scales the backpropagated
 * bra; the result is accumulated into grad. Returns f = <Z_0>.
 */
template <typename Weight>
double adjoint_sweep(const CircuitTemplate &tmpl,
                     std::span<const HalfAngle> table, const DropoutMask &mask,
                     Weight &&weight, std::span<double> grad) {
    const std::size_t n = tmpl.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> ket(dim, Complex{0.0, 0.0});
    ket[0] = 1.0;
    execute(tmpl, table, mask, ket);

    std::vector<Complex> bra(ket);
    kernels::pauli_z(bra, n, kReadoutQubit);
    const double f = kernels::inner(ket, bra).real();
    const double w = weight(f);
    if (w == 0.0) {
        return f;
    }
    for (auto &b : bra) {
        b *= w;
    }

    const auto &gates = tmpl.gates();
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        const auto &pg = *it;
        if (mask.contains(pg.id)) {
            continue;
        }
        if (std::holds_alternative<ParamSlot>(pg.gate.angle_source)) {
            // d f / d theta = Im <bra| G |ket>, ket taken right after the gate.
            grad[slot_of(pg)] +=
                std::imag(generator_element(bra, ket, n, pg.gate));
        }
        kernels::apply(ket, n, pg.gate, table[pg.id], true);
        kernels::apply(bra, n, pg.gate, table[pg.id], true);
    }
    return f;
}

} // namespace

double evaluate_output(const CircuitTemplate &tmpl,
                       std::span<const HalfAngle> table,
                       const DropoutMask &mask) {
    std::vector<Complex> psi(std::size_t{1} << tmpl.n_qubits(),
                             Complex{0.0, 0.0});
    psi[0] = 1.0;
    execute(tmpl, table, mask, psi);
    double acc = 0.0;
    const std::size_t t = bit_of(tmpl.n_qubits(), kReadoutQubit);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        acc += (i & t) ? -std::norm(psi[i]) : std::norm(psi[i]);
    }
    return acc;
}

double accumulate_output_gradient(const CircuitTemplate &tmpl,
                                  std::span<const HalfAngle> table,
                                  const DropoutMask &mask,
                                  const std::function<double(double)> &weight,
                                  std::span<double> grad) {
    return adjoint_sweep(tmpl, table, mask, weight, grad);
}

namespace {

void check_batch(const CircuitTemplate &tmpl, std::span<const double> params,
                 const DropoutMask &mask, std::span<const Sample> batch) {
    QDROP_ABORT_IF(batch.empty(), "gradient of an empty batch");
    for (const auto &s : batch) {
        check_inputs(tmpl, params, mask, s.x);
    }
}

} // namespace

std::vector<double> output_gradient(const CircuitTemplate &tmpl,
                                    std::span<const double> params,
                                    const DropoutMask &mask,
                                    std::span<const double> x) {
    check_inputs(tmpl, params, mask, x);
    std::vector<double> grad(tmpl.parameter_count(), 0.0);
    const auto table = resolve_half_angles(tmpl, params, x);
    adjoint_sweep(tmpl, table, mask, [](double) { return 1.0; }, grad);
    return grad;
}

std::vector<double> output_gradient_parameter_shift(
    const CircuitTemplate &tmpl, std::span<const double> params,
    const DropoutMask &mask, std::span<const double> x) {
    check_inputs(tmpl, params, mask, x);
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    const double d_plus = (std::numbers::sqrt2 + 1.0) / (4.0 * std::numbers::sqrt2);
    const double d_minus = (std::numbers::sqrt2 - 1.0) / (4.0 * std::numbers::sqrt2);

    auto table = resolve_half_angles(tmpl, params, x);
    std::vector<double> grad(tmpl.parameter_count(), 0.0);
    for (std::size_t s = 0; s < grad.size(); ++s) {
        const std::size_t id = tmpl.slot_gate(s);
        if (mask.contains(id)) {
            continue;
        }
        const HalfAngle saved = table[id];
        auto shifted = [&](double shift) {
            table[id] = HalfAngle::of(params[s] + shift);
            return evaluate_output(tmpl, table, mask);
        };
        if (tmpl.gate(id).gate.kind == GateKind::CRy) {
            grad[s] = d_plus * (shifted(kHalfPi) - shifted(-kHalfPi)) -
                      d_minus * (shifted(3.0 * kHalfPi) - shifted(-3.0 * kHalfPi));
        } else {
            grad[s] = 0.5 * (shifted(kHalfPi) - shifted(-kHalfPi));
        }
        table[id] = saved;
    }
    return grad;
}

std::vector<double> gradient(const CircuitTemplate &tmpl,
                             std::span<const double> params,
                             const DropoutMask &mask,
                             std::span<const Sample> batch, LossKind loss) {
    check_batch(tmpl, params, mask, batch);
    std::vector<double> grad(tmpl.parameter_count(), 0.0);
    const auto slots = slot_half_angles(params);
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const auto &sample : batch) {
        auto table = embedding_half_angles(tmpl, sample.x);
        bind_slots(tmpl, slots, table);
        adjoint_sweep(
            tmpl, table, mask,
            [&](double f) {
                return scale * sample_loss_derivative(loss, f, sample.y);
            },
            grad);
    }
    return grad;
}

std::vector<double> gradient_parameter_shift(const CircuitTemplate &tmpl,
                                             std::span<const double> params,
                                             const DropoutMask &mask,
                                             std::span<const Sample> batch,
                                             LossKind loss) {
    check_batch(tmpl, params, mask, batch);
    std::vector<double> grad(tmpl.parameter_count(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const auto &sample : batch) {
        const double f = model_output(tmpl, params, mask, sample.x);
        const double w = scale * sample_loss_derivative(loss, f, sample.y);
        const auto df =
            output_gradient_parameter_shift(tmpl, params, mask, sample.x);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] += w * df[i];
        }
    }
    return grad;
}

Eigen::MatrixXcd state_jacobian(const CircuitTemplate &tmpl,
                                std::span<const double> params,
                                std::span<const double> x,
                                Eigen::VectorXcd *state_out) {
    const DropoutMask none;
    check_inputs(tmpl, params, none, x);
    const std::size_t n = tmpl.n_qubits();
    const std::size_t dim = std::size_t{1} << n;
    const auto table = resolve_half_angles(tmpl, params, x);

    std::vector<Complex> psi(dim, Complex{0.0, 0.0});
    psi[0] = 1.0;
    // Column s holds |d_s psi> propagated through the gates applied so far.
    Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim),
        static_cast<Eigen::Index>(tmpl.parameter_count()));
    std::vector<std::size_t> live;
    live.reserve(tmpl.parameter_count());
    for (const auto &pg : tmpl.gates()) {
        kernels::apply(psi, n, pg.gate, table[pg.id]);
        for (auto s : live) {
            kernels::apply(std::span<Complex>(jac.col(static_cast<Eigen::Index>(s)).data(), dim),
                           n, pg.gate, table[pg.id]);
        }
        if (const auto *slot = std::get_if<ParamSlot>(&pg.gate.angle_source)) {
            // dU = (-i/2) G U
            auto col = jac.col(static_cast<Eigen::Index>(slot->index));
            std::span<Complex> d(col.data(), dim);
            std::copy(psi.begin(), psi.end(), d.begin());
            kernels::apply_generator(d, n, pg.gate);
            for (auto &v : d) {
                v *= Complex{0.0, -0.5};
            }
            live.push_back(slot->index);
        }
    }
    if (state_out != nullptr) {
        *state_out = Eigen::Map<Eigen::VectorXcd>(psi.data(),
                                                  static_cast<Eigen::Index>(dim));
    }
    return jac;
}

QfimReport qfim(const CircuitTemplate &tmpl, std::span<const double> params,
                std::span<const double> x, double rank_tolerance) {
    Eigen::VectorXcd psi;
    const Eigen::MatrixXcd jac = state_jacobian(tmpl, params, x, &psi);
    // Project out the state direction: F = 4 Re[(P J)^+ (P J)].
    const Eigen::RowVectorXcd overlap = psi.adjoint() * jac;
    const Eigen::MatrixXcd projected = jac - psi * overlap;
    QfimReport report;
    report.matrix = 4.0 * (projected.adjoint() * projected).real();
    report.matrix = 0.5 * (report.matrix + report.matrix.transpose()).eval();
    report.rank_tolerance = rank_tolerance;
    report.rank = qfim_rank(report.matrix, rank_tolerance);
    report.x.assign(x.begin(), x.end());
    return report;
}

std::size_t qfim_rank(const Eigen::MatrixXd &matrix, double tolerance) {
    QDROP_ABORT_IF(matrix.rows() != matrix.cols(),
                   "rank of a non-square matrix requested");
    if (matrix.size() == 0) {
        return 0;
    }
    Eigen::VectorXd singular;
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym <= 1e-9 * std::max(1.0, matrix.cwiseAbs().maxCoeff())) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            matrix, Eigen::EigenvaluesOnly);
        singular = eig.eigenvalues().cwiseAbs();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
        singular = svd.singularValues();
    }
    const double cut =
        std::max(tolerance * singular.maxCoeff(), kRankAbsoluteFloor);
    return static_cast<std::size_t>((singular.array() > cut).count());
}

} // namespace qdrop
