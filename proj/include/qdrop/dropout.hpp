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
 * Gate dropout for layered circuits.
 *
 * A mask is drawn in two stages: every layer is selected with probability
 * p_L, then candidate gates inside the selected layers are dropped with their
 * gate probability. The five strategies differ in the candidates and in what
 * else a selected rotation takes down with it:
 *
 *   rotation           rotation gates, p_R
 *   entangling         entangling gates, p_E
 *   independent        both of the above, each with its own probability
 *   canonical          rotation gates, p_R; a selected rotation on qubit q also
 *                      drops the entangling gates earlier in its layer that
 *                      target q and those later in its layer controlled by q
 *   canonical_forward  like canonical but only the later, q-controlled gates
 *
 * Stream order: one draw per layer (layer order), then one draw per candidate
 * gate of a selected layer (gate id order).
 */
#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qdrop/circuit_template.hpp"
#include "qdrop/random.hpp"

namespace qdrop {

enum class Strategy {
    None,
    Canonical,
    CanonicalForward,
    Rotation,
    Entangling,
    Independent,
};

const char *strategy_name(Strategy s);
Strategy strategy_from_name(std::string_view name);

struct DropoutConfig {
    Strategy strategy{Strategy::None};
    double p_layer{0.0};
    double p_rot{0.0};
    double p_ent{0.0};

    /// Throws on probabilities outside [0, 1] or on a probability the
    /// strategy does not use being non-zero.
    void validate() const;

    [[nodiscard]] bool uses_rotation() const;
    [[nodiscard]] bool uses_entangling() const;
    /// Largest combined drop probability p_L * p_G over the gate kinds used.
    [[nodiscard]] double combined_probability() const;

    bool operator==(const DropoutConfig &) const = default;
};

/// p = p_G * p_L
double drop_probability(double p_gate, double p_layer);

struct DropBudget {
    std::size_t max_dropped;
    double max_fraction;
};

/// Largest number of parameters that can be removed while M stays at or
/// above the full state-space dimension 2^(n+1) - 2.
DropBudget max_drop_params(std::size_t parameter_count, std::size_t n_qubits);

/// 2^(n+1) - 2
std::size_t max_parameter_dimension(std::size_t n_qubits);

DropoutMask sample_mask(const CircuitTemplate &tmpl,
                        const DropoutConfig &config, Rng &rng);

/// Marginal probability that each parameter slot's gate is dropped.
std::vector<double> slot_drop_probabilities(const CircuitTemplate &tmpl,
                                            const DropoutConfig &config);

inline constexpr double kNoRescale = std::numeric_limits<double>::infinity();

/// Multiplies every parameter by (1 - drop_p)^(1/k); k = infinity is the
/// identity.
std::vector<double> rescale_params(std::span<const double> params,
                                   double drop_p, double k);

} // namespace qdrop
