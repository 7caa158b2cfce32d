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
#include "qdrop/statesim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qdrop/error.hpp"

namespace qdrop {

namespace {

constexpr double kNormTolerance = 1e-10;

inline std::size_t bit_of(std::size_t n, std::size_t q) {
    return std::size_t{1} << (n - 1 - q);
}

void check_qubit(std::size_t q, std::size_t n) {
    QDROP_ABORT_IF_NOT(q < n, "qubit index " + std::to_string(q) +
                                  " out of range for " + std::to_string(n) +
                                  "-qubit register");
}

} // namespace

const char *gate_kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::Rx:
        return "Rx";
    case GateKind::Ry:
        return "Ry";
    case GateKind::Rz:
        return "Rz";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::CRy:
        return "CRy";
    }
    return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
    for (auto kind : {GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::CNOT,
                      GateKind::CRy}) {
        if (name == gate_kind_name(kind)) {
            return kind;
        }
    }
    abort_with("unknown gate kind '" + std::string(name) + "'");
}

const char *feature_map_name(FeatureMap map) {
    switch (map) {
    case FeatureMap::Arcsin:
        return "arcsin";
    case FeatureMap::ArccosSquare:
        return "arccos_sq";
    case FeatureMap::TwiceArcsinHalf:
        return "2arcsin_half";
    case FeatureMap::TwiceArccosHalfSquare:
        return "2arccos_half_sq";
    }
    return "?";
}

FeatureMap feature_map_from_name(std::string_view name) {
    for (auto map : {FeatureMap::Arcsin, FeatureMap::ArccosSquare,
                     FeatureMap::TwiceArcsinHalf,
                     FeatureMap::TwiceArccosHalfSquare}) {
        if (name == feature_map_name(map)) {
            return map;
        }
    }
    abort_with("unknown feature map '" + std::string(name) + "'");
}

void validate_gate(const Gate &gate, std::size_t n_qubits) {
    check_qubit(gate.target, n_qubits);
    if (is_controlled(gate.kind)) {
        QDROP_ABORT_IF_NOT(gate.control.has_value(),
                           std::string(gate_kind_name(gate.kind)) +
                               " requires a control qubit");
        check_qubit(*gate.control, n_qubits);
        QDROP_ABORT_IF(*gate.control == gate.target,
                       "control and target must differ");
    } else {
        QDROP_ABORT_IF(gate.control.has_value(),
                       std::string(gate_kind_name(gate.kind)) +
                           " takes no control qubit");
    }
    const bool has_angle = !std::holds_alternative<NoAngle>(gate.angle_source);
    QDROP_ABORT_IF(is_parametrized(gate.kind) != has_angle,
                   std::string(gate_kind_name(gate.kind)) +
                       (has_angle ? " takes no angle" : " needs an angle source"));
    QDROP_ABORT_IF(gate.kind == GateKind::CRy &&
                       !std::holds_alternative<ParamSlot>(gate.angle_source),
                   "CRy must bind a parameter slot");
}

HalfAngle HalfAngle::of(double theta) {
    return {std::cos(0.5 * theta), std::sin(0.5 * theta)};
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    QDROP_ABORT_IF(n_qubits < 1 || n_qubits > kMaxQubits,
                   "register size must be in [1, " +
                       std::to_string(kMaxQubits) + "]");
    amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t dim = amplitudes.size();
    QDROP_ABORT_IF(dim < 2 || (dim & (dim - 1)) != 0,
                   "amplitude count must be a power of two >= 2");
    StateVector state;
    state.n_qubits_ = static_cast<std::size_t>(std::countr_zero(dim));
    QDROP_ABORT_IF(state.n_qubits_ > kMaxQubits, "register too large");
    state.amplitudes_ = std::move(amplitudes);
    QDROP_ABORT_IF(std::abs(state.norm_squared() - 1.0) > kNormTolerance,
                   "amplitudes are not normalized");
    return state;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const auto &a : amplitudes_) {
        acc += std::norm(a);
    }
    return acc;
}

StateVector apply_gate(StateVector state, const Gate &gate,
                       std::optional<double> angle) {
    const std::size_t n = state.n_qubits();
    check_qubit(gate.target, n);
    if (is_controlled(gate.kind)) {
        QDROP_ABORT_IF_NOT(gate.control.has_value(),
                           "controlled gate without control qubit");
        check_qubit(*gate.control, n);
        QDROP_ABORT_IF(*gate.control == gate.target,
                       "control and target must differ");
    } else {
        QDROP_ABORT_IF(gate.control.has_value(),
                       std::string(gate_kind_name(gate.kind)) +
                           " takes no control qubit");
    }
    if (is_parametrized(gate.kind)) {
        QDROP_ABORT_IF_NOT(angle.has_value(),
                           std::string("missing angle for ") +
                               gate_kind_name(gate.kind));
        kernels::apply(state.data(), n, gate, HalfAngle::of(*angle));
    } else {
        QDROP_ABORT_IF(angle.has_value(), "CNOT takes no angle");
        kernels::apply(state.data(), n, gate, HalfAngle{});
    }
    return state;
}

double expectation_z(const StateVector &state, std::size_t qubit) {
    const std::size_t n = state.n_qubits();
    check_qubit(qubit, n);
    const std::size_t mask = bit_of(n, qubit);
    const auto psi = state.amplitudes();
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

double fidelity(const StateVector &a, const StateVector &b) {
    QDROP_ABORT_IF(a.n_qubits() != b.n_qubits(),
                   "fidelity of states with different register sizes");
    return std::norm(kernels::inner(a.amplitudes(), b.amplitudes()));
}

double subset_purity(const StateVector &state,
                     std::span<const std::size_t> subset) {
    const std::size_t n = state.n_qubits();
    std::vector<bool> in_subset(n, false);
    for (auto q : subset) {
        check_qubit(q, n);
        in_subset[q] = true;
    }
    std::size_t k = static_cast<std::size_t>(
        std::count(in_subset.begin(), in_subset.end(), true));
    // Pure state: both sides of a bipartition share their purity.
    if (2 * k > n) {
        in_subset.flip();
        k = n - k;
    }
    if (k == 0) {
        return 1.0;
    }

    // Regroup amplitudes as a 2^k x 2^(n-k) matrix A; purity = ||A A^+||_F^2.
    const std::size_t rows = std::size_t{1} << k;
    const std::size_t cols = std::size_t{1} << (n - k);
    std::vector<Complex> matrix(rows * cols);
    const auto psi = state.amplitudes();
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::size_t r = 0;
        std::size_t c = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t b = (i >> (n - 1 - q)) & 1U;
            if (in_subset[q]) {
                r = (r << 1) | b;
            } else {
                c = (c << 1) | b;
            }
        }
        matrix[r * cols + c] = psi[i];
    }
    double purity = 0.0;
    for (std::size_t r1 = 0; r1 < rows; ++r1) {
        for (std::size_t r2 = r1; r2 < rows; ++r2) {
            Complex rho{0.0, 0.0};
            const Complex *a = &matrix[r1 * cols];
            const Complex *b = &matrix[r2 * cols];
            for (std::size_t c = 0; c < cols; ++c) {
                rho += a[c] * std::conj(b[c]);
            }
            purity += (r1 == r2 ? 1.0 : 2.0) * std::norm(rho);
        }
    }
    return purity;
}

namespace kernels {

void rx(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t dim = psi.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex v0 = psi[i];
            const Complex v1 = psi[i + stride];
            // [[c, -is], [-is, c]]
            psi[i] = {a.c * v0.real() + a.s * v1.imag(),
                      a.c * v0.imag() - a.s * v1.real()};
            psi[i + stride] = {a.c * v1.real() + a.s * v0.imag(),
                               a.c * v1.imag() - a.s * v0.real()};
        }
    }
}

void ry(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t dim = psi.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex v0 = psi[i];
            const Complex v1 = psi[i + stride];
            psi[i] = a.c * v0 - a.s * v1;
            psi[i + stride] = a.s * v0 + a.c * v1;
        }
    }
}

void rz(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a) {
    const std::size_t stride = bit_of(n, q);
    const std::size_t dim = psi.size();
    const Complex lo{a.c, -a.s};
    const Complex hi{a.c, a.s};
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            psi[i] *= lo;
            psi[i + stride] *= hi;
        }
    }
}

void cnot(std::span<Complex> psi, std::size_t n, std::size_t control,
          std::size_t target) {
    const std::size_t cmask = bit_of(n, control);
    const std::size_t tmask = bit_of(n, target);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(psi[i], psi[i | tmask]);
        }
    }
}

void cry(std::span<Complex> psi, std::size_t n, std::size_t control,
         std::size_t target, HalfAngle a) {
    const std::size_t cmask = bit_of(n, control);
    const std::size_t tmask = bit_of(n, target);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if ((i & cmask) && !(i & tmask)) {
            const Complex v0 = psi[i];
            const Complex v1 = psi[i | tmask];
            psi[i] = a.c * v0 - a.s * v1;
            psi[i | tmask] = a.s * v0 + a.c * v1;
        }
    }
}

void pauli_z(std::span<Complex> psi, std::size_t n, std::size_t q) {
    const std::size_t mask = bit_of(n, q);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (i & mask) {
            psi[i] = -psi[i];
        }
    }
}

void apply(std::span<Complex> psi, std::size_t n, const Gate &gate,
           HalfAngle a, bool inverse) {
    if (inverse) {
        a = a.inverse();
    }
    switch (gate.kind) {
    case GateKind::Rx:
        rx(psi, n, gate.target, a);
        break;
    case GateKind::Ry:
        ry(psi, n, gate.target, a);
        break;
    case GateKind::Rz:
        rz(psi, n, gate.target, a);
        break;
    case GateKind::CNOT:
        cnot(psi, n, *gate.control, gate.target);
        break;
    case GateKind::CRy:
        cry(psi, n, *gate.control, gate.target, a);
        break;
    }
}

void apply_generator(std::span<Complex> psi, std::size_t n, const Gate &gate) {
    const std::size_t tmask = bit_of(n, gate.target);
    const Complex i_unit{0.0, 1.0};
    switch (gate.kind) {
    case GateKind::Rx:
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!(i & tmask)) {
                std::swap(psi[i], psi[i | tmask]);
            }
        }
        break;
    case GateKind::Ry:
        // Y = [[0, -i], [i, 0]]
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!(i & tmask)) {
                const Complex v0 = psi[i];
                const Complex v1 = psi[i | tmask];
                psi[i] = -i_unit * v1;
                psi[i | tmask] = i_unit * v0;
            }
        }
        break;
    case GateKind::Rz:
        pauli_z(psi, n, gate.target);
        break;
    case GateKind::CRy: {
        const std::size_t cmask = bit_of(n, *gate.control);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!(i & cmask)) {
                psi[i] = 0.0;
            } else if (!(i & tmask)) {
                const Complex v0 = psi[i];
                const Complex v1 = psi[i | tmask];
                psi[i] = -i_unit * v1;
                psi[i | tmask] = i_unit * v0;
            }
        }
        break;
    }
    case GateKind::CNOT:
        abort_with("CNOT has no generator");
    }
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

} // namespace kernels

} // namespace qdrop
