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
 * Overparametrization, expressibility and entanglement estimators.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdrop/circuit_template.hpp"
#include "qdrop/dropout.hpp"
#include "qdrop/random.hpp"
#include "qdrop/statesim.hpp"

namespace qdrop {

using Inputs = std::vector<std::vector<double>>;

struct ParameterDimensionCurve {
    CircuitFamily family{CircuitFamily::Regression};
    std::vector<std::size_t> layers;
    std::vector<std::size_t> parameter_counts;
    std::vector<double> mean_D;
    /// (M - mean_D) / M
    std::vector<double> mean_R;
    std::size_t D_max{0};
    /// First layer count from which every mean_D equals D_max.
    std::optional<std::size_t> critical_layers;
};

/// Mean QFIM rank over every input and n_theta uniform [0, 2pi) parameter
/// draws, for each layer count.
ParameterDimensionCurve
parameter_dimension_curve(CircuitFamily family, std::size_t n_qubits,
                          std::span<const std::size_t> layers,
                          const Inputs &inputs, std::size_t n_theta, Rng &rng);

/// (dim - 1)(1 - F)^(dim - 2)
double haar_fidelity_pdf(double F, std::size_t dim);

/// Haar probability of a fidelity in [lo, hi].
double haar_bin_mass(double lo, double hi, std::size_t dim);

/// Column-normalized complex Gaussian vector.
StateVector haar_random_state(std::size_t n_qubits, Rng &rng);

std::vector<StateVector> haar_state_pool(std::size_t n_qubits,
                                         std::size_t count, Rng &rng);

/**
 * Output states for n_param_vectors random parameter vectors times the first
 * n_data inputs. With dropout active, each parameter vector gets one fresh
 * mask shared by all of its inputs.
 */
std::vector<StateVector> circuit_state_pool(const CircuitTemplate &tmpl,
                                            const DropoutConfig &dropout,
                                            const Inputs &inputs,
                                            std::size_t n_param_vectors,
                                            std::size_t n_data, Rng &rng);

inline constexpr std::size_t kDefaultBins = 75;

struct ExpressibilityReport {
    double kl{0.0};
    std::size_t bins{kDefaultBins};
    std::size_t n_fidelities{0};
    std::vector<std::size_t> histogram;
    DropoutConfig dropout{};
};

/// KL(empirical || Haar) over uniform fidelity bins; empty bins add nothing.
double fidelity_kl(std::span<const std::size_t> histogram, std::size_t dim);

/// KL of a histogram with every count in the top bin.
double max_binned_kl(std::size_t bins, std::size_t dim);

/// Fidelities of n_fidelities random distinct ordered pairs (i != j) of the
/// pool, binned and compared with the Haar distribution.
ExpressibilityReport expressibility_of_pool(std::span<const StateVector> pool,
                                            std::size_t n_fidelities,
                                            std::size_t bins, Rng &rng);

/// Pool of n_param_vectors * n_data states, paired into as many fidelities.
ExpressibilityReport expressibility(const CircuitTemplate &tmpl,
                                    const DropoutConfig &dropout,
                                    const Inputs &inputs,
                                    std::size_t n_param_vectors,
                                    std::size_t n_data, std::size_t bins,
                                    Rng &rng);

/// 1 - 2^-N * sum over all qubit subsets of Tr[rho_S^2].
double concentrable_entanglement(const StateVector &state);

/// 1 - 2 * 3^N / (4^N + 2^N)
double haar_ce_mean(std::size_t n_qubits);

/// (3/16)^N
double haar_ce_variance_order(std::size_t n_qubits);

struct PartyBand {
    const char *structure;
    double min_ce; ///< exclusive
    double max_ce; ///< inclusive
};

/// Five-qubit CE intervals, most entangled first.
std::span<const PartyBand> five_qubit_bands();

/// Band whose (min, max] contains ce; "1x1x1x1x1" for ce == 0.
const PartyBand &party_band(double ce);

struct EntanglementReport {
    double mean_ce{0.0};
    double var_ce{0.0}; ///< population variance
    std::size_t n_states{0};
    double haar_mean{0.0};
    double haar_var_order{0.0};
    /// Only for five qubits.
    std::string party_band;
    DropoutConfig dropout{};
};

EntanglementReport ce_statistics_of_pool(std::span<const StateVector> pool);

EntanglementReport ce_statistics(const CircuitTemplate &tmpl,
                                 const DropoutConfig &dropout,
                                 const Inputs &inputs,
                                 std::size_t n_param_vectors,
                                 std::size_t n_data, Rng &rng);

} // namespace qdrop
