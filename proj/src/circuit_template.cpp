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
#include "qdrop/circuit_template.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdrop/error.hpp"

namespace qdrop {

namespace {

constexpr double kDomainSlack = 1e-12;

double guarded(double v, const char *what) {
    QDROP_ABORT_IF(!(std::abs(v) <= 1.0 + kDomainSlack),
                   std::string("feature value outside the ") + what +
                       " domain: " + std::to_string(v));
    return std::clamp(v, -1.0, 1.0);
}

} // namespace

const char *gate_role_name(GateRole role) {
    switch (role) {
    case GateRole::Embedding:
        return "embedding";
    case GateRole::Rotation:
        return "rotation";
    case GateRole::Entangling:
        return "entangling";
    }
    return "?";
}

GateRole gate_role_from_name(std::string_view name) {
    for (auto r :
         {GateRole::Embedding, GateRole::Rotation, GateRole::Entangling}) {
        if (name == gate_role_name(r)) {
            return r;
        }
    }
    abort_with("unknown gate role '" + std::string(name) + "'");
}

const char *family_name(CircuitFamily family) {
    switch (family) {
    case CircuitFamily::Regression:
        return "regression";
    case CircuitFamily::Classification:
        return "classification";
    case CircuitFamily::Custom:
        return "custom";
    }
    return "?";
}

CircuitFamily family_from_name(std::string_view name) {
    for (auto f : {CircuitFamily::Regression, CircuitFamily::Classification,
                   CircuitFamily::Custom}) {
        if (name == family_name(f)) {
            return f;
        }
    }
    abort_with("unknown circuit family '" + std::string(name) + "'");
}

CircuitTemplate::CircuitTemplate(std::size_t n_qubits,
                                 std::size_t embedding_arity,
                                 std::size_t n_layers, CircuitFamily family,
                                 std::vector<PlacedGate> gates)
    : n_qubits_(n_qubits), embedding_arity_(embedding_arity),
      n_layers_(n_layers), family_(family), gates_(std::move(gates)) {
    QDROP_ABORT_IF(n_qubits < 1 || n_qubits > kMaxQubits,
                   "template register size out of range");
    std::vector<std::size_t> slot_owner;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const auto &pg = gates_[i];
        QDROP_ABORT_IF(pg.id != i, "gate ids must follow execution order");
        validate_gate(pg.gate, n_qubits);
        QDROP_ABORT_IF(n_layers_ > 0 && pg.layer >= n_layers_,
                       "gate layer index out of range");
        const auto &src = pg.gate.angle_source;
        if (pg.role == GateRole::Embedding) {
            const auto *feat = std::get_if<FeatureAngle>(&src);
            QDROP_ABORT_IF(feat == nullptr &&
                               !std::holds_alternative<FixedAngle>(src),
                           "embedding gates cannot bind parameter slots");
            QDROP_ABORT_IF(feat != nullptr && feat->feature >= embedding_arity,
                           "embedding gate reads a feature beyond the arity");
            QDROP_ABORT_IF(is_controlled(pg.gate.kind),
                           "embedding gates must be single-qubit rotations");
        } else {
            QDROP_ABORT_IF(std::holds_alternative<FeatureAngle>(src) ||
                               std::holds_alternative<FixedAngle>(src),
                           "variational gates must bind parameter slots");
            if (const auto *slot = std::get_if<ParamSlot>(&src)) {
                if (slot->index >= slot_owner.size()) {
                    slot_owner.resize(slot->index + 1, gates_.size());
                }
                QDROP_ABORT_IF(slot_owner[slot->index] != gates_.size(),
                               "parameter slot bound twice");
                slot_owner[slot->index] = i;
            }
        }
    }
    for (auto owner : slot_owner) {
        QDROP_ABORT_IF(owner == gates_.size(),
                       "parameter slots must be contiguous from 0");
    }
    slot_gate_ = std::move(slot_owner);
}

DropoutMask DropoutMask::from_ids(std::size_t gate_count,
                                  std::span<const std::size_t> ids) {
    DropoutMask mask(gate_count);
    for (auto id : ids) {
        mask.drop(id);
    }
    return mask;
}

void DropoutMask::drop(std::size_t gate_id) {
    QDROP_ABORT_IF(gate_id >= flags_.size(),
                   "dropped gate id " + std::to_string(gate_id) +
                       " beyond the template");
    if (flags_[gate_id] == 0) {
        flags_[gate_id] = 1;
        ++count_;
    }
}

std::vector<std::size_t> DropoutMask::ids() const {
    std::vector<std::size_t> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] != 0) {
            out.push_back(i);
        }
    }
    return out;
}

double feature_angle(FeatureMap map, double x) {
    switch (map) {
    case FeatureMap::Arcsin:
        return std::asin(guarded(x, "arcsin"));
    case FeatureMap::ArccosSquare:
        return std::acos(guarded(x * x, "arccos"));
    case FeatureMap::TwiceArcsinHalf:
        return 2.0 * std::asin(guarded(0.5 * x, "arcsin"));
    case FeatureMap::TwiceArccosHalfSquare: {
        const double h = guarded(0.5 * x, "arccos");
        return 2.0 * std::acos(h * h);
    }
    }
    return 0.0;
}

std::vector<HalfAngle> embedding_half_angles(const CircuitTemplate &tmpl,
                                             std::span<const double> x) {
    QDROP_ABORT_IF(x.size() != tmpl.embedding_arity(),
                   "feature arity mismatch: expected " +
                       std::to_string(tmpl.embedding_arity()) + ", got " +
                       std::to_string(x.size()));
    std::vector<HalfAngle> table(tmpl.gate_count());
    for (const auto &pg : tmpl.gates()) {
        if (const auto *f = std::get_if<FeatureAngle>(&pg.gate.angle_source)) {
            table[pg.id] = HalfAngle::of(feature_angle(f->map, x[f->feature]));
        } else if (const auto *fixed =
                       std::get_if<FixedAngle>(&pg.gate.angle_source)) {
            table[pg.id] = HalfAngle::of(fixed->radians);
        }
    }
    return table;
}

std::vector<HalfAngle> slot_half_angles(std::span<const double> params) {
    std::vector<HalfAngle> out(params.size());
    std::transform(params.begin(), params.end(), out.begin(),
                   [](double t) { return HalfAngle::of(t); });
    return out;
}

void bind_slots(const CircuitTemplate &tmpl,
                std::span<const HalfAngle> slot_angles,
                std::span<HalfAngle> table) {
    const auto &owners = tmpl.slot_gates();
    for (std::size_t s = 0; s < owners.size(); ++s) {
        table[owners[s]] = slot_angles[s];
    }
}

std::vector<HalfAngle> resolve_half_angles(const CircuitTemplate &tmpl,
                                           std::span<const double> params,
                                           std::span<const double> x) {
    auto table = embedding_half_angles(tmpl, x);
    const auto slots = slot_half_angles(params);
    bind_slots(tmpl, slots, table);
    return table;
}

void execute(const CircuitTemplate &tmpl, std::span<const HalfAngle> table,
             const DropoutMask &mask, std::span<Complex> psi) {
    const std::size_t n = tmpl.n_qubits();
    for (const auto &pg : tmpl.gates()) {
        if (!mask.contains(pg.id)) {
            kernels::apply(psi, n, pg.gate, table[pg.id]);
        }
    }
}

void check_inputs(const CircuitTemplate &tmpl, std::span<const double> params,
                  const DropoutMask &mask, std::span<const double> x) {
    QDROP_ABORT_IF(params.size() != tmpl.parameter_count(),
                   "parameter count mismatch: expected " +
                       std::to_string(tmpl.parameter_count()) + ", got " +
                       std::to_string(params.size()));
    QDROP_ABORT_IF(x.size() != tmpl.embedding_arity(),
                   "feature arity mismatch: expected " +
                       std::to_string(tmpl.embedding_arity()) + ", got " +
                       std::to_string(x.size()));
    QDROP_ABORT_IF(mask.universe() != 0 &&
                       mask.universe() != tmpl.gate_count(),
                   "mask was built for a different template");
}

StateVector run_circuit(const CircuitTemplate &tmpl,
                        std::span<const double> params,
                        const DropoutMask &mask, std::span<const double> x) {
    check_inputs(tmpl, params, mask, x);
    StateVector state(tmpl.n_qubits());
    const auto table = resolve_half_angles(tmpl, params, x);
    execute(tmpl, table, mask, state.data());
    return state;
}

} // namespace qdrop
