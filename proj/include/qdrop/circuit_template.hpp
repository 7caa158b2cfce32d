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
 * Layer-tagged gate lists, dropout masks, and the masked circuit runner.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdrop/statesim.hpp"

namespace qdrop {

enum class GateRole { Embedding, Rotation, Entangling };

const char *gate_role_name(GateRole role);
GateRole gate_role_from_name(std::string_view name);

enum class CircuitFamily { Regression, Classification, Custom };

const char *family_name(CircuitFamily family);
CircuitFamily family_from_name(std::string_view name);

struct PlacedGate {
    Gate gate;
    std::size_t id{0};       ///< position in execution order
    std::size_t layer{0};
    std::size_t sublayer{0}; ///< running sublayer index within the layer
    GateRole role{GateRole::Rotation};

    bool operator==(const PlacedGate &) const = default;
};

/**
 * Immutable ordered gate list. Construction checks that gate ids match their
 * position, that parameter slots 0..M-1 are each bound exactly once, that
 * embedding gates only read features and that variational gates only read
 * parameter slots.
 */
class CircuitTemplate {
  public:
    CircuitTemplate(std::size_t n_qubits, std::size_t embedding_arity,
                    std::size_t n_layers, CircuitFamily family,
                    std::vector<PlacedGate> gates);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t embedding_arity() const {
        return embedding_arity_;
    }
    [[nodiscard]] std::size_t n_layers() const { return n_layers_; }
    [[nodiscard]] CircuitFamily family() const { return family_; }
    [[nodiscard]] std::size_t parameter_count() const {
        return slot_gate_.size();
    }
    [[nodiscard]] std::size_t gate_count() const { return gates_.size(); }
    [[nodiscard]] const std::vector<PlacedGate> &gates() const {
        return gates_;
    }
    [[nodiscard]] const PlacedGate &gate(std::size_t id) const {
        return gates_.at(id);
    }
    /// Gate id bound to parameter slot `slot`.
    [[nodiscard]] std::size_t slot_gate(std::size_t slot) const {
        return slot_gate_.at(slot);
    }
    [[nodiscard]] const std::vector<std::size_t> &slot_gates() const {
        return slot_gate_;
    }

    bool operator==(const CircuitTemplate &) const = default;

  private:
    std::size_t n_qubits_;
    std::size_t embedding_arity_;
    std::size_t n_layers_;
    CircuitFamily family_;
    std::vector<PlacedGate> gates_;
    std::vector<std::size_t> slot_gate_;
};

/// Set of suppressed gate ids for one training step.
class DropoutMask {
  public:
    DropoutMask() = default;
    explicit DropoutMask(std::size_t gate_count)
        : flags_(gate_count, 0) {}

    static DropoutMask from_ids(std::size_t gate_count,
                                std::span<const std::size_t> ids);

    void drop(std::size_t gate_id);
    [[nodiscard]] bool contains(std::size_t gate_id) const {
        return gate_id < flags_.size() && flags_[gate_id] != 0;
    }
    /// Sorted dropped ids.
    [[nodiscard]] std::vector<std::size_t> ids() const;
    [[nodiscard]] std::size_t size() const { return count_; }
    [[nodiscard]] bool empty() const { return count_ == 0; }
    /// Length of the gate universe this mask was built for (0 = unbounded
    /// empty mask).
    [[nodiscard]] std::size_t universe() const { return flags_.size(); }

    int epoch{0};

    bool operator==(const DropoutMask &other) const {
        return ids() == other.ids() && epoch == other.epoch;
    }

  private:
    std::vector<std::uint8_t> flags_;
    std::size_t count_{0};
};

/// Evaluates the feature transform; throws when x lies outside its domain.
double feature_angle(FeatureMap map, double x);

/// Half-angle table indexed by gate id with only the embedding gates filled
/// in (everything else is the identity rotation).
std::vector<HalfAngle> embedding_half_angles(const CircuitTemplate &tmpl,
                                             std::span<const double> x);

/// Writes per-slot half angles into the gate-indexed table.
void bind_slots(const CircuitTemplate &tmpl,
                std::span<const HalfAngle> slot_angles,
                std::span<HalfAngle> table);

std::vector<HalfAngle> slot_half_angles(std::span<const double> params);

/// Full gate-indexed half-angle table for (params, x).
std::vector<HalfAngle> resolve_half_angles(const CircuitTemplate &tmpl,
                                           std::span<const double> params,
                                           std::span<const double> x);

/// Applies every non-dropped gate of `tmpl` to psi in place.
void execute(const CircuitTemplate &tmpl, std::span<const HalfAngle> table,
             const DropoutMask &mask, std::span<Complex> psi);

void check_inputs(const CircuitTemplate &tmpl, std::span<const double> params,
                  const DropoutMask &mask, std::span<const double> x);

/// Runs the circuit from |0...0>, skipping masked gates.
StateVector run_circuit(const CircuitTemplate &tmpl,
                        std::span<const double> params,
                        const DropoutMask &mask, std::span<const double> x);

} // namespace qdrop
