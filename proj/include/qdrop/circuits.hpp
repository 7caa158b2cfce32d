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
 * The two data re-uploading ansaetze and their scalar readout.
 *
 * Regression layer (5 qubits, 15 parameters):
 *   Ry(asin x) Rz(acos x^2) on every qubit, then three blocks of
 *   {Rx | Rz | Rx} rotations each followed by a CNOT staircase q -> q+1.
 *
 * Classification layer (5 qubits, 9 parameters):
 *   Ry(2 asin(x_j/2)) Rz(2 acos((x_j/2)^2)) with x_1, x_2 alternating down
 *   the register, then Rx rotations and a CRy staircase q -> q+1.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdrop/circuit_template.hpp"

namespace qdrop {

/// Measured qubit of the scalar readout <Z>.
inline constexpr std::size_t kReadoutQubit = 0;

CircuitTemplate build_regression_qnn(std::size_t n_qubits, std::size_t n_layers);
CircuitTemplate build_classification_qnn(std::size_t n_qubits,
                                         std::size_t n_layers);
/// Gateless template; run_circuit returns |0...0>.
CircuitTemplate build_empty(std::size_t n_qubits, std::size_t embedding_arity);

CircuitTemplate build_family(CircuitFamily family, std::size_t n_qubits,
                             std::size_t n_layers);

struct EmbeddingAngle {
    std::size_t qubit;
    GateKind kind;
    double radians;
};

/// Angle assignment of a single embedding block for input x.
std::vector<EmbeddingAngle> embedding_angles(std::span<const double> x,
                                             CircuitFamily family,
                                             std::size_t n_qubits = 5);

/// <Z_0> of the final state.
double model_output(const CircuitTemplate &tmpl,
                    std::span<const double> params, const DropoutMask &mask,
                    std::span<const double> x);

nlohmann::json template_to_json(const CircuitTemplate &tmpl);
CircuitTemplate template_from_json(const nlohmann::json &doc);

} // namespace qdrop
