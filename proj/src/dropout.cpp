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
#include "qdrop/dropout.hpp"

#include <algorithm>
#include <cmath>

#include "qdrop/error.hpp"

namespace qdrop {

namespace {

void check_probability(double p, const char *what) {
    QDROP_ABORT_IF(!(p >= 0.0 && p <= 1.0),
                   std::string(what) + " must lie in [0, 1], got " +
                       std::to_string(p));
}

std::size_t layer_count(const CircuitTemplate &tmpl) {
    std::size_t n = tmpl.n_layers();
    for (const auto &pg : tmpl.gates()) {
        n = std::max(n, pg.layer + 1);
    }
    return n;
}

/// Whether a canonical selection of `rotation` also removes `ent`.
bool linked(const PlacedGate &rotation, const PlacedGate &ent, bool backward) {
    if (ent.role != GateRole::Entangling || ent.layer != rotation.layer) {
        return false;
    }
    const std::size_t q = rotation.gate.target;
    if (ent.id > rotation.id) {
        return ent.gate.control && *ent.gate.control == q;
    }
    return backward && ent.gate.target == q;
}

} // namespace

const char *strategy_name(Strategy s) {
    switch (s) {
    case Strategy::None:
        return "none";
    case Strategy::Canonical:
        return "canonical";
    case Strategy::CanonicalForward:
        return "canonical_forward";
    case Strategy::Rotation:
        return "rotation";
    case Strategy::Entangling:
        return "entangling";
    case Strategy::Independent:
        return "independent";
    }
    return "?";
}

Strategy strategy_from_name(std::string_view name) {
    for (auto s : {Strategy::None, Strategy::Canonical,
                   Strategy::CanonicalForward, Strategy::Rotation,
                   Strategy::Entangling, Strategy::Independent}) {
        if (name == strategy_name(s)) {
            return s;
        }
    }
    abort_with("unknown dropout strategy '" + std::string(name) + "'");
}

bool DropoutConfig::uses_rotation() const {
    return strategy == Strategy::Canonical ||
           strategy == Strategy::CanonicalForward ||
           strategy == Strategy::Rotation ||
           strategy == Strategy::Independent;
}

bool DropoutConfig::uses_entangling() const {
    return strategy == Strategy::Entangling ||
           strategy == Strategy::Independent;
}

void DropoutConfig::validate() const {
    check_probability(p_layer, "p_L");
    check_probability(p_rot, "p_R");
    check_probability(p_ent, "p_E");
    const std::string name = strategy_name(strategy);
    QDROP_ABORT_IF(!uses_rotation() && p_rot != 0.0,
                   "strategy " + name + " does not use p_R");
    QDROP_ABORT_IF(!uses_entangling() && p_ent != 0.0,
                   "strategy " + name + " does not use p_E");
    QDROP_ABORT_IF(strategy == Strategy::None && p_layer != 0.0,
                   "strategy none does not use p_L");
}

double DropoutConfig::combined_probability() const {
    double p = 0.0;
    if (uses_rotation()) {
        p = std::max(p, p_layer * p_rot);
    }
    if (uses_entangling()) {
        p = std::max(p, p_layer * p_ent);
    }
    return p;
}

double drop_probability(double p_gate, double p_layer) {
    check_probability(p_gate, "p_G");
    check_probability(p_layer, "p_L");
    return p_gate * p_layer;
}

std::size_t max_parameter_dimension(std::size_t n_qubits) {
    QDROP_ABORT_IF(n_qubits < 1 || n_qubits > 62, "register size out of range");
    return (std::size_t{1} << (n_qubits + 1)) - 2;
}

DropBudget max_drop_params(std::size_t parameter_count, std::size_t n_qubits) {
    QDROP_ABORT_IF(parameter_count < 1, "parameter count must be positive");
    const std::size_t d_max = max_parameter_dimension(n_qubits);
    const std::size_t dropped =
        parameter_count > d_max ? parameter_count - d_max : 0;
    return {dropped, static_cast<double>(dropped) /
                         static_cast<double>(parameter_count)};
}

DropoutMask sample_mask(const CircuitTemplate &tmpl,
                        const DropoutConfig &config, Rng &rng) {
    config.validate();
    DropoutMask mask(tmpl.gate_count());
    if (config.strategy == Strategy::None) {
        return mask;
    }
    std::vector<char> selected(layer_count(tmpl), 0);
    for (auto &s : selected) {
        s = uniform01(rng) < config.p_layer ? 1 : 0;
    }

    const bool canonical = config.strategy == Strategy::Canonical ||
                           config.strategy == Strategy::CanonicalForward;
    const bool backward = config.strategy == Strategy::Canonical;
    const auto &gates = tmpl.gates();
    for (const auto &pg : gates) {
        if (pg.role == GateRole::Embedding || !selected[pg.layer]) {
            continue;
        }
        double p = 0.0;
        if (pg.role == GateRole::Rotation && config.uses_rotation()) {
            p = config.p_rot;
        } else if (pg.role == GateRole::Entangling &&
                   config.uses_entangling()) {
            p = config.p_ent;
        } else {
            continue;
        }
        if (!(uniform01(rng) < p)) {
            continue;
        }
        mask.drop(pg.id);
        if (canonical) {
            for (const auto &other : gates) {
                if (linked(pg, other, backward)) {
                    mask.drop(other.id);
                }
            }
        }
    }
    return mask;
}

std::vector<double> slot_drop_probabilities(const CircuitTemplate &tmpl,
                                            const DropoutConfig &config) {
    config.validate();
    std::vector<double> out(tmpl.parameter_count(), 0.0);
    if (config.strategy == Strategy::None) {
        return out;
    }
    const bool canonical = config.strategy == Strategy::Canonical ||
                           config.strategy == Strategy::CanonicalForward;
    const bool backward = config.strategy == Strategy::Canonical;
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto &pg = tmpl.gate(tmpl.slot_gate(s));
        if (pg.role == GateRole::Rotation) {
            out[s] = config.uses_rotation() ? config.p_layer * config.p_rot
                                            : 0.0;
        } else if (config.uses_entangling()) {
            out[s] = config.p_layer * config.p_ent;
        } else if (canonical) {
            int links = 0;
            for (const auto &r : tmpl.gates()) {
                if (r.role == GateRole::Rotation && linked(r, pg, backward)) {
                    ++links;
                }
            }
            out[s] = config.p_layer * (1.0 - std::pow(1.0 - config.p_rot, links));
        }
    }
    return out;
}

std::vector<double> rescale_params(std::span<const double> params,
                                   double drop_p, double k) {
    QDROP_ABORT_IF(!(k > 0.0), "rescale root k must be positive");
    std::vector<double> out(params.begin(), params.end());
    if (std::isinf(k)) {
        return out;
    }
    QDROP_ABORT_IF(!(drop_p >= 0.0 && drop_p < 1.0),
                   "rescaling needs a drop probability in [0, 1)");
    const double s = std::pow(1.0 - drop_p, 1.0 / k);
    for (auto &p : out) {
        p *= s;
    }
    return out;
}

} // namespace qdrop
