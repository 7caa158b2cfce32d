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
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdrop/analysis.hpp"
#include "qdrop/circuits.hpp"
#include "qdrop/datagen.hpp"
#include "qdrop/dropout.hpp"
#include "qdrop/gradients.hpp"
#include "qdrop/io.hpp"
#include "qdrop/training.hpp"

namespace py = pybind11;
using namespace qdrop;

namespace {

DropoutMask mask_of(const CircuitTemplate &t, const std::vector<std::size_t> &dropped) {
    if (dropped.empty()) {
        return {};
    }
    return DropoutMask::from_ids(t.gate_count(), dropped);
}

py::array_t<std::complex<double>> to_array(const StateVector &s) {
    const auto amps = s.amplitudes();
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(amps.size()));
    std::copy(amps.begin(), amps.end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_qdrop, m) {
    m.doc() = "Quantum dropout simulator core";

    py::class_<CircuitTemplate>(m, "CircuitTemplate")
        .def_property_readonly("n_qubits", &CircuitTemplate::n_qubits)
        .def_property_readonly("n_layers", &CircuitTemplate::n_layers)
        .def_property_readonly("parameter_count", &CircuitTemplate::parameter_count)
        .def_property_readonly("gate_count", &CircuitTemplate::gate_count)
        .def("to_json", [](const CircuitTemplate &t) { return template_to_json(t).dump(); })
        .def_static("from_json", [](const std::string &text) {
            return template_from_json(Json::parse(text));
        });

    m.def("regression_qnn", &build_regression_qnn, py::arg("n_qubits"),
          py::arg("n_layers"));
    m.def("classification_qnn", &build_classification_qnn, py::arg("n_qubits"),
          py::arg("n_layers"));

    m.def(
        "run_circuit",
        [](const CircuitTemplate &t, const std::vector<double> &params,
           const std::vector<double> &x, const std::vector<std::size_t> &dropped) {
            return to_array(run_circuit(t, params, mask_of(t, dropped), x));
        },
        py::arg("template"), py::arg("params"), py::arg("x"),
        py::arg("dropped") = std::vector<std::size_t>{},
        "Final statevector (qubit 0 is the most significant bit).");

    m.def(
        "model_output",
        [](const CircuitTemplate &t, const std::vector<double> &params,
           const std::vector<double> &x, const std::vector<std::size_t> &dropped) {
            return model_output(t, params, mask_of(t, dropped), x);
        },
        py::arg("template"), py::arg("params"), py::arg("x"),
        py::arg("dropped") = std::vector<std::size_t>{});

    m.def(
        "output_gradient",
        [](const CircuitTemplate &t, const std::vector<double> &params,
           const std::vector<double> &x, const std::vector<std::size_t> &dropped,
           const std::string &method) {
            const auto mask = mask_of(t, dropped);
            if (method == "adjoint") {
                return output_gradient(t, params, mask, x);
            }
            if (method == "parameter_shift") {
                return output_gradient_parameter_shift(t, params, mask, x);
            }
            throw py::value_error("method must be 'adjoint' or 'parameter_shift'");
        },
        py::arg("template"), py::arg("params"), py::arg("x"),
        py::arg("dropped") = std::vector<std::size_t>{},
        py::arg("method") = "adjoint");

    m.def(
        "qfim",
        [](const CircuitTemplate &t, const std::vector<double> &params,
           const std::vector<double> &x) {
            const auto rep = qfim(t, params, x);
            const auto n = static_cast<py::ssize_t>(rep.matrix.rows());
            py::array_t<double> mat({n, n});
            auto view = mat.mutable_unchecked<2>();
            for (py::ssize_t i = 0; i < n; ++i) {
                for (py::ssize_t j = 0; j < n; ++j) {
                    view(i, j) = rep.matrix(i, j);
                }
            }
            return py::make_tuple(mat, rep.rank);
        },
        py::arg("template"), py::arg("params"), py::arg("x"),
        "(QFIM, rank) of the unmasked circuit.");

    m.def(
        "sample_mask",
        [](const CircuitTemplate &t, const std::string &strategy, double p_layer,
           double p_rot, double p_ent, std::uint64_t seed) {
            const DropoutConfig cfg{strategy_from_name(strategy), p_layer, p_rot, p_ent};
            cfg.validate();
            Rng rng(seed);
            return sample_mask(t, cfg, rng).ids();
        },
        py::arg("template"), py::arg("strategy"), py::arg("p_layer"),
        py::arg("p_rot") = 0.0, py::arg("p_ent") = 0.0, py::arg("seed") = 0);

    m.def(
        "max_drop_params",
        [](std::size_t parameter_count, std::size_t n_qubits) {
            const auto b = max_drop_params(parameter_count, n_qubits);
            return py::make_tuple(b.max_dropped, b.max_fraction);
        },
        py::arg("parameter_count"), py::arg("n_qubits"));

    m.def(
        "concentrable_entanglement",
        [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>
               amps) {
            std::vector<Complex> v(amps.data(), amps.data() + amps.size());
            return concentrable_entanglement(StateVector::from_amplitudes(std::move(v)));
        },
        py::arg("amplitudes"));

    m.def(
        "make_dataset",
        [](const std::string &task, std::uint64_t seed) {
            const auto d = make_task_dataset(task_from_name(task), seed);
            py::dict out;
            out["features"] = d.features;
            out["targets"] = d.targets;
            out["train_indices"] = d.train_indices;
            out["test_indices"] = d.test_indices;
            return out;
        },
        py::arg("task"), py::arg("seed") = 0);

    m.def(
        "_train_json",
        [](const std::string &config, std::uint64_t data_seed, std::uint64_t seed) {
            const auto cfg = train_config_from_json(Json::parse(config));
            const auto data = make_task_dataset(cfg.task, data_seed);
            TrainRun run;
            {
                py::gil_scoped_release release;
                run = train(cfg, data, seed);
            }
            return run_to_json(run).dump();
        },
        py::arg("config"), py::arg("data_seed"), py::arg("seed"));
}
