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
#include "qdrop/circuits.hpp"

#include <string>

#include "qdrop/error.hpp"

namespace qdrop {

namespace {

class LayerWriter {
  public:
    explicit LayerWriter(std::vector<PlacedGate> &gates) : gates_(gates) {}

    void start_layer(std::size_t layer) {
        layer_ = layer;
        sublayer_ = 0;
    }
    void next_sublayer() { ++sublayer_; }

    void add(GateKind kind, std::size_t target,
             std::optional<std::size_t> control, AngleSource src,
             GateRole role) {
        gates_.push_back(PlacedGate{Gate{kind, target, control, src},
                                    gates_.size(), layer_, sublayer_, role});
    }

    std::size_t next_slot() { return slot_++; }

  private:
    std::vector<PlacedGate> &gates_;
    std::size_t layer_{0};
    std::size_t sublayer_{0};
    std::size_t slot_{0};
};

void check_shape(std::size_t n_qubits, std::size_t n_layers) {
    QDROP_ABORT_IF(n_layers < 1, "a QNN needs at least one layer");
    QDROP_ABORT_IF(n_qubits < 2 || n_qubits > kMaxQubits,
                   "QNN register size must be in [2, " +
                       std::to_string(kMaxQubits) + "]");
}

} // namespace

CircuitTemplate build_regression_qnn(std::size_t n_qubits,
                                     std::size_t n_layers) {
    check_shape(n_qubits, n_layers);
    std::vector<PlacedGate> gates;
    LayerWriter w(gates);
    for (std::size_t l = 0; l < n_layers; ++l) {
        w.start_layer(l);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            w.add(GateKind::Ry, q, std::nullopt,
                  FeatureAngle{0, FeatureMap::Arcsin}, GateRole::Embedding);
        }
        w.next_sublayer();
        for (std::size_t q = 0; q < n_qubits; ++q) {
            w.add(GateKind::Rz, q, std::nullopt,
                  FeatureAngle{0, FeatureMap::ArccosSquare},
                  GateRole::Embedding);
        }
        for (auto kind : {GateKind::Rx, GateKind::Rz, GateKind::Rx}) {
            w.next_sublayer();
            for (std::size_t q = 0; q < n_qubits; ++q) {
                w.add(kind, q, std::nullopt, ParamSlot{w.next_slot()},
                      GateRole::Rotation);
            }
            w.next_sublayer();
            for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
                w.add(GateKind::CNOT, q + 1, q, NoAngle{},
                      GateRole::Entangling);
            }
        }
    }
    return CircuitTemplate(n_qubits, 1, n_layers, CircuitFamily::Regression,
                           std::move(gates));
}

CircuitTemplate build_classification_qnn(std::size_t n_qubits,
                                         std::size_t n_layers) {
    check_shape(n_qubits, n_layers);
    std::vector<PlacedGate> gates;
    LayerWriter w(gates);
    for (std::size_t l = 0; l < n_layers; ++l) {
        w.start_layer(l);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            w.add(GateKind::Ry, q, std::nullopt,
                  FeatureAngle{q % 2, FeatureMap::TwiceArcsinHalf},
                  GateRole::Embedding);
        }
        w.next_sublayer();
        for (std::size_t q = 0; q < n_qubits; ++q) {
            w.add(GateKind::Rz, q, std::nullopt,
                  FeatureAngle{q % 2, FeatureMap::TwiceArccosHalfSquare},
                  GateRole::Embedding);
        }
        w.next_sublayer();
        for (std::size_t q = 0; q < n_qubits; ++q) {
            w.add(GateKind::Rx, q, std::nullopt, ParamSlot{w.next_slot()},
                  GateRole::Rotation);
        }
        w.next_sublayer();
        for (std::size_t q = 0; q + 1 < n_qubits; ++q) {
            w.add(GateKind::CRy, q + 1, q, ParamSlot{w.next_slot()},
                  GateRole::Entangling);
        }
    }
    return CircuitTemplate(n_qubits, 2, n_layers,
                           CircuitFamily::Classification, std::move(gates));
}

CircuitTemplate build_empty(std::size_t n_qubits,
                            std::size_t embedding_arity) {
    return CircuitTemplate(n_qubits, embedding_arity, 0, CircuitFamily::Custom,
                           {});
}

CircuitTemplate build_family(CircuitFamily family, std::size_t n_qubits,
                             std::size_t n_layers) {
    switch (family) {
    case CircuitFamily::Regression:
        return build_regression_qnn(n_qubits, n_layers);
    case CircuitFamily::Classification:
        return build_classification_qnn(n_qubits, n_layers);
    case CircuitFamily::Custom:
        break;
    }
    abort_with("no builder for custom circuit family");
}

std::vector<EmbeddingAngle> embedding_angles(std::span<const double> x,
                                             CircuitFamily family,
                                             std::size_t n_qubits) {
    QDROP_ABORT_IF(family == CircuitFamily::Custom,
                   "custom templates have no fixed embedding");
    const auto tmpl = build_family(family, n_qubits, 1);
    QDROP_ABORT_IF(x.size() != tmpl.embedding_arity(),
                   "feature arity mismatch");
    std::vector<EmbeddingAngle> out;
    for (const auto &pg : tmpl.gates()) {
        if (pg.role != GateRole::Embedding) {
            continue;
        }
        const auto &f = std::get<FeatureAngle>(pg.gate.angle_source);
        out.push_back({pg.gate.target, pg.gate.kind,
                       feature_angle(f.map, x[f.feature])});
    }
    return out;
}

double model_output(const CircuitTemplate &tmpl,
                    std::span<const double> params, const DropoutMask &mask,
                    std::span<const double> x) {
    return expectation_z(run_circuit(tmpl, params, mask, x), kReadoutQubit);
}

nlohmann::json template_to_json(const CircuitTemplate &tmpl) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &pg : tmpl.gates()) {
        nlohmann::json g{{"id", pg.id},
                         {"kind", gate_kind_name(pg.gate.kind)},
                         {"target", pg.gate.target},
                         {"layer", pg.layer},
                         {"sublayer", pg.sublayer},
                         {"role", gate_role_name(pg.role)}};
        if (pg.gate.control) {
            g["control"] = *pg.gate.control;
        }
        std::visit(
            [&g](const auto &src) {
                using T = std::decay_t<decltype(src)>;
                if constexpr (std::is_same_v<T, FixedAngle>) {
                    g["angle_source"] = {{"type", "fixed"},
                                         {"radians", src.radians}};
                } else if constexpr (std::is_same_v<T, ParamSlot>) {
                    g["angle_source"] = {{"type", "param"},
                                         {"slot", src.index}};
                } else if constexpr (std::is_same_v<T, FeatureAngle>) {
                    g["angle_source"] = {{"type", "feature"},
                                         {"feature", src.feature},
                                         {"map", feature_map_name(src.map)}};
                }
            },
            pg.gate.angle_source);
        gates.push_back(std::move(g));
    }
    return {{"family", family_name(tmpl.family())},
            {"n_qubits", tmpl.n_qubits()},
            {"n_layers", tmpl.n_layers()},
            {"embedding_arity", tmpl.embedding_arity()},
            {"parameter_count", tmpl.parameter_count()},
            {"gates", std::move(gates)}};
}

CircuitTemplate template_from_json(const nlohmann::json &doc) {
    try {
        std::vector<PlacedGate> gates;
        for (const auto &g : doc.at("gates")) {
            PlacedGate pg;
            pg.id = g.at("id").get<std::size_t>();
            pg.gate.kind = gate_kind_from_name(g.at("kind").get<std::string>());
            pg.gate.target = g.at("target").get<std::size_t>();
            if (g.contains("control")) {
                pg.gate.control = g.at("control").get<std::size_t>();
            }
            if (g.contains("angle_source")) {
                const auto &src = g.at("angle_source");
                const auto type = src.at("type").get<std::string>();
                if (type == "fixed") {
                    pg.gate.angle_source =
                        FixedAngle{src.at("radians").get<double>()};
                } else if (type == "param") {
                    pg.gate.angle_source =
                        ParamSlot{src.at("slot").get<std::size_t>()};
                } else if (type == "feature") {
                    pg.gate.angle_source = FeatureAngle{
                        src.at("feature").get<std::size_t>(),
                        feature_map_from_name(src.at("map").get<std::string>())};
                } else {
                    abort_with("unknown angle source type '" + type + "'");
                }
            }
            pg.layer = g.at("layer").get<std::size_t>();
            pg.sublayer = g.at("sublayer").get<std::size_t>();
            pg.role = gate_role_from_name(g.at("role").get<std::string>());
            gates.push_back(std::move(pg));
        }
        CircuitTemplate tmpl(
            doc.at("n_qubits").get<std::size_t>(),
            doc.at("embedding_arity").get<std::size_t>(),
            doc.at("n_layers").get<std::size_t>(),
            family_from_name(doc.at("family").get<std::string>()),
            std::move(gates));
        if (doc.contains("parameter_count")) {
            QDROP_ABORT_IF(doc.at("parameter_count").get<std::size_t>() !=
                               tmpl.parameter_count(),
                           "parameter_count disagrees with the gate list");
        }
        return tmpl;
    } catch (const nlohmann::json::exception &e) {
        abort_with(std::string("malformed circuit document: ") + e.what());
    }
}

} // namespace qdrop
