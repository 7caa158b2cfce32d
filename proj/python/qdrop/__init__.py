# Copyright 2026 The qdrop Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the qdrop quantum dropout simulator."""

import json

from ._qdrop import (
    CircuitTemplate,
    classification_qnn,
    concentrable_entanglement,
    make_dataset,
    max_drop_params,
    model_output,
    output_gradient,
    qfim,
    regression_qnn,
    run_circuit,
    sample_mask,
)
from . import _qdrop

__all__ = [
    "CircuitTemplate",
    "classification_qnn",
    "concentrable_entanglement",
    "make_dataset",
    "max_drop_params",
    "model_output",
    "output_gradient",
    "qfim",
    "regression_qnn",
    "run_circuit",
    "sample_mask",
    "train",
]


def train(config, seed=0, data_seed=0):
    """Train one QNN. `config` uses the CLI keys (task, n-layers, epochs, ...)."""
    return json.loads(_qdrop._train_json(json.dumps(config), data_seed, seed))
