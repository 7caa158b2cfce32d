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
 * Dense statevector simulation for small registers.
 *
 * Basis index i stores qubit 0 in its most significant bit, so for an
 * n-qubit register qubit q lives at bit position (n - 1 - q).
 */
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace qdrop {

using Complex = std::complex<double>;

/// Largest register the simulator accepts.
inline constexpr std::size_t kMaxQubits = 16;

enum class GateKind { Rx, Ry, Rz, CNOT, CRy };

const char *gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string_view name);

[[nodiscard]] constexpr bool is_parametrized(GateKind kind) {
    return kind != GateKind::CNOT;
}
[[nodiscard]] constexpr bool is_controlled(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CRy;
}

/// Data-encoding transforms applied to a classical feature before it becomes
/// a rotation angle.
enum class FeatureMap {
    Arcsin,          ///< asin(x)
    ArccosSquare,    ///< acos(x^2)
    TwiceArcsinHalf, ///< 2 asin(x/2)
    TwiceArccosHalfSquare, ///< 2 acos((x/2)^2)
};

const char *feature_map_name(FeatureMap map);
FeatureMap feature_map_from_name(std::string_view name);

struct NoAngle {
    bool operator==(const NoAngle &) const = default;
};
struct FixedAngle {
    double radians;
    bool operator==(const FixedAngle &) const = default;
};
struct ParamSlot {
    std::size_t index;
    bool operator==(const ParamSlot &) const = default;
};
/// Angle computed from feature `feature` of the input through `map`.
struct FeatureAngle {
    std::size_t feature;
    FeatureMap map;
    bool operator==(const FeatureAngle &) const = default;
};

using AngleSource = std::variant<NoAngle, FixedAngle, ParamSlot, FeatureAngle>;

struct Gate {
    GateKind kind{GateKind::Rx};
    std::size_t target{0};
    std::optional<std::size_t> control{};
    AngleSource angle_source{NoAngle{}};

    bool operator==(const Gate &) const = default;
};

/// Checks the structural invariants of a gate on an n-qubit register.
void validate_gate(const Gate &gate, std::size_t n_qubits);

/// cos and sin of half a rotation angle; every rotation kernel consumes this.
struct HalfAngle {
    double c{1.0};
    double s{0.0};

    static HalfAngle of(double theta);
    [[nodiscard]] HalfAngle inverse() const { return {c, -s}; }
};

class StateVector {
  public:
    /// |0...0> on n_qubits qubits.
    explicit StateVector(std::size_t n_qubits);

    /// Wraps explicit amplitudes. Length must be a power of two and the
    /// vector must be normalized within 1e-10.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    [[nodiscard]] std::span<Complex> data() { return amplitudes_; }
    [[nodiscard]] double norm_squared() const;

    bool operator==(const StateVector &) const = default;

  private:
    StateVector() = default;

    std::size_t n_qubits_{0};
    std::vector<Complex> amplitudes_;
};

/// Applies `gate` with the given angle. The angle must be present exactly
/// when the gate kind is parametrized.
StateVector apply_gate(StateVector state, const Gate &gate,
                       std::optional<double> angle);

/// <psi|Z_q|psi>
double expectation_z(const StateVector &state, std::size_t qubit);

/// |<a|b>|^2
double fidelity(const StateVector &a, const StateVector &b);

/// Tr[rho_S^2] for the reduced state on `subset`. Computed on whichever side
/// of the bipartition is smaller, so memory stays O(2^n).
double subset_purity(const StateVector &state,
                     std::span<const std::size_t> subset);

/// In-place kernels shared by the circuit runner and the differentiators.
/// They do no validation.
namespace kernels {

void rx(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a);
void ry(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a);
void rz(std::span<Complex> psi, std::size_t n, std::size_t q, HalfAngle a);
void cnot(std::span<Complex> psi, std::size_t n, std::size_t control,
          std::size_t target);
void cry(std::span<Complex> psi, std::size_t n, std::size_t control,
         std::size_t target, HalfAngle a);
void pauli_z(std::span<Complex> psi, std::size_t n, std::size_t q);

/// Applies the gate unitary (or its inverse) using precomputed half-angle trig.
void apply(std::span<Complex> psi, std::size_t n, const Gate &gate,
           HalfAngle a, bool inverse = false);

/// Applies the Hermitian generator G of a rotation exp(-i theta G / 2):
/// X, Y, Z for the single-qubit rotations and |1><1| (x) Y for CRy.
void apply_generator(std::span<Complex> psi, std::size_t n, const Gate &gate);

Complex inner(std::span<const Complex> a, std::span<const Complex> b);

} // namespace kernels

} // namespace qdrop
