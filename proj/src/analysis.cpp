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
#include "qdrop/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "qdrop/circuits.hpp"
#include "qdrop/error.hpp"
#include "qdrop/gradients.hpp"
#include "qdrop/parallel.hpp"

namespace qdrop {

namespace {

std::vector<double> random_params(std::size_t count, Rng &rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> params(count);
    for (auto &p : params) {
        p = angle(rng);
    }
    return params;
}

void check_pool_inputs(const Inputs &inputs, std::size_t n_param_vectors,
                       std::size_t n_data) {
    QDROP_ABORT_IF(n_param_vectors == 0, "need at least one parameter vector");
    QDROP_ABORT_IF(n_data == 0, "need at least one data input");
    QDROP_ABORT_IF(inputs.size() < n_data,
                   "dataset supplies " + std::to_string(inputs.size()) +
                       " inputs, " + std::to_string(n_data) + " requested");
}

} // namespace

ParameterDimensionCurve
parameter_dimension_curve(CircuitFamily family, std::size_t n_qubits,
                          std::span<const std::size_t> layers,
                          const Inputs &inputs, std::size_t n_theta, Rng &rng) {
    QDROP_ABORT_IF(layers.empty(), "empty layer range");
    QDROP_ABORT_IF(inputs.empty(), "no training inputs");
    QDROP_ABORT_IF(n_theta == 0, "n_theta must be >= 1");

    ParameterDimensionCurve curve;
    curve.family = family;
    curve.D_max = max_parameter_dimension(n_qubits);
    for (std::size_t L : layers) {
        const auto tmpl = build_family(family, n_qubits, L);
        const std::size_t M = tmpl.parameter_count();
        // Draw serially so the curve does not depend on the worker count.
        std::vector<std::vector<double>> thetas;
        for (std::size_t t = 0; t < n_theta; ++t) {
            thetas.push_back(random_params(M, rng));
        }
        const std::size_t jobs = n_theta * inputs.size();
        std::vector<std::size_t> ranks(jobs);
        parallel_for(jobs, [&](std::size_t j) {
            ranks[j] = qfim(tmpl, thetas[j / inputs.size()],
                            inputs[j % inputs.size()])
                           .rank;
        });
        double total = 0.0;
        for (auto r : ranks) {
            total += static_cast<double>(r);
        }
        const double mean = total / static_cast<double>(jobs);
        curve.layers.push_back(L);
        curve.parameter_counts.push_back(M);
        curve.mean_D.push_back(mean);
        curve.mean_R.push_back((static_cast<double>(M) - mean) /
                               static_cast<double>(M));
    }
    const auto d_max = static_cast<double>(curve.D_max);
    for (std::size_t i = curve.layers.size(); i-- > 0;) {
        if (std::abs(curve.mean_D[i] - d_max) > 1e-9) {
            break;
        }
        curve.critical_layers = curve.layers[i];
    }
    return curve;
}

double haar_fidelity_pdf(double F, std::size_t dim) {
    QDROP_ABORT_IF(dim < 2, "Haar fidelity density needs dim >= 2");
    QDROP_ABORT_IF(!(F >= 0.0 && F <= 1.0), "fidelity outside [0, 1]");
    return static_cast<double>(dim - 1) *
           std::pow(1.0 - F, static_cast<double>(dim - 2));
}

double haar_bin_mass(double lo, double hi, std::size_t dim) {
    QDROP_ABORT_IF(dim < 2, "Haar fidelity density needs dim >= 2");
    QDROP_ABORT_IF(!(lo >= 0.0 && lo <= hi && hi <= 1.0), "invalid bin");
    const auto e = static_cast<double>(dim - 1);
    return std::pow(1.0 - lo, e) - std::pow(1.0 - hi, e);
}

StateVector haar_random_state(std::size_t n_qubits, Rng &rng) {
    QDROP_ABORT_IF(n_qubits == 0 || n_qubits > kMaxQubits,
                   "unsupported qubit count");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> amps(std::size_t{1} << n_qubits);
    double norm = 0.0;
    for (auto &a : amps) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        a = {re, im};
        norm += re * re + im * im;
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (auto &a : amps) {
        a *= inv;
    }
    return StateVector::from_amplitudes(std::move(amps));
}

std::vector<StateVector> haar_state_pool(std::size_t n_qubits,
                                         std::size_t count, Rng &rng) {
    std::vector<StateVector> pool;
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        pool.push_back(haar_random_state(n_qubits, rng));
    }
    return pool;
}

std::vector<StateVector> circuit_state_pool(const CircuitTemplate &tmpl,
                                            const DropoutConfig &dropout,
                                            const Inputs &inputs,
                                            std::size_t n_param_vectors,
                                            std::size_t n_data, Rng &rng) {
    dropout.validate();
    check_pool_inputs(inputs, n_param_vectors, n_data);
    std::vector<std::vector<double>> params;
    std::vector<DropoutMask> masks;
    params.reserve(n_param_vectors);
    masks.reserve(n_param_vectors);
    for (std::size_t v = 0; v < n_param_vectors; ++v) {
        params.push_back(random_params(tmpl.parameter_count(), rng));
        masks.push_back(sample_mask(tmpl, dropout, rng));
    }
    std::vector<StateVector> pool(n_param_vectors * n_data,
                                  StateVector(tmpl.n_qubits()));
    parallel_for(n_param_vectors, [&](std::size_t v) {
        for (std::size_t d = 0; d < n_data; ++d) {
            pool[v * n_data + d] =
                run_circuit(tmpl, params[v], masks[v], inputs[d]);
        }
    });
    return pool;
}

double fidelity_kl(std::span<const std::size_t> histogram, std::size_t dim) {
    const std::size_t bins = histogram.size();
    QDROP_ABORT_IF(bins < 2, "need at least two bins");
    std::size_t total = 0;
    for (auto c : histogram) {
        total += c;
    }
    QDROP_ABORT_IF(total == 0, "empty histogram");
    double kl = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (histogram[b] == 0) {
            continue;
        }
        const double p =
            static_cast<double>(histogram[b]) / static_cast<double>(total);
        const double q =
            haar_bin_mass(static_cast<double>(b) / static_cast<double>(bins),
                          static_cast<double>(b + 1) /
                              static_cast<double>(bins),
                          dim);
        kl += p * std::log(p / q);
    }
    return kl;
}

double max_binned_kl(std::size_t bins, std::size_t dim) {
    QDROP_ABORT_IF(bins < 2, "need at least two bins");
    std::vector<std::size_t> h(bins, 0);
    h.back() = 1;
    return fidelity_kl(h, dim);
}

ExpressibilityReport expressibility_of_pool(std::span<const StateVector> pool,
                                            std::size_t n_fidelities,
                                            std::size_t bins, Rng &rng) {
    QDROP_ABORT_IF(bins < 2, "need at least two bins");
    QDROP_ABORT_IF(pool.size() < 2, "state pool needs at least two states");
    QDROP_ABORT_IF(n_fidelities == 0, "need at least one fidelity");
    const std::size_t n = pool.size();
    QDROP_ABORT_IF(static_cast<double>(n_fidelities) >
                       static_cast<double>(n) * static_cast<double>(n - 1),
                   "more fidelities requested than distinct ordered pairs");

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    ExpressibilityReport report;
    report.bins = bins;
    report.n_fidelities = n_fidelities;
    report.histogram.assign(bins, 0);
    while (seen.size() < n_fidelities) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        if (i == j || !seen.emplace(i, j).second) {
            continue;
        }
        const double f = std::clamp(fidelity(pool[i], pool[j]), 0.0, 1.0);
        const auto b = std::min(
            bins - 1, static_cast<std::size_t>(f * static_cast<double>(bins)));
        ++report.histogram[b];
    }
    report.kl = fidelity_kl(report.histogram, pool.front().dim());
    return report;
}

ExpressibilityReport expressibility(const CircuitTemplate &tmpl,
                                    const DropoutConfig &dropout,
                                    const Inputs &inputs,
                                    std::size_t n_param_vectors,
                                    std::size_t n_data, std::size_t bins,
                                    Rng &rng) {
    QDROP_ABORT_IF(bins < 2, "need at least two bins");
    const auto pool =
        circuit_state_pool(tmpl, dropout, inputs, n_param_vectors, n_data, rng);
    auto report = expressibility_of_pool(pool, pool.size(), bins, rng);
    report.dropout = dropout;
    return report;
}

double concentrable_entanglement(const StateVector &state) {
    const std::size_t n = state.n_qubits();
    QDROP_ABORT_IF(n == 0 || n > 10,
                   "concentrable entanglement needs 1 to 10 qubits");
    // Complementary subsets of a pure state have equal purity, so sum over the
    // subsets that leave out the last qubit and double.
    double sum = 0.0;
    std::vector<std::size_t> subset;
    const std::size_t half = std::size_t{1} << (n - 1);
    for (std::size_t bits = 0; bits < half; ++bits) {
        subset.clear();
        for (std::size_t q = 0; q + 1 < n; ++q) {
            if ((bits >> q) & 1U) {
                subset.push_back(q);
            }
        }
        sum += subset.empty() ? 1.0 : subset_purity(state, subset);
    }
    return 1.0 - 2.0 * sum / static_cast<double>(std::size_t{1} << n);
}

double haar_ce_mean(std::size_t n_qubits) {
    const auto n = static_cast<double>(n_qubits);
    return 1.0 -
           2.0 * std::pow(3.0, n) / (std::pow(4.0, n) + std::pow(2.0, n));
}

double haar_ce_variance_order(std::size_t n_qubits) {
    return std::pow(3.0 / 16.0, static_cast<double>(n_qubits));
}

namespace {

constexpr std::array<PartyBand, 7> kFiveQubitBands{{
    {"5", 0.53125, 0.625},
    {"3x2", 0.5, 0.53125},
    {"4x1", 0.4375, 0.5},
    {"2x2x1", 0.375, 0.4375},
    {"3x1x1", 0.25, 0.375},
    {"2x1x1x1", 0.0, 0.25},
    {"1x1x1x1x1", 0.0, 0.0},
}};

} // namespace

std::span<const PartyBand> five_qubit_bands() { return kFiveQubitBands; }

const PartyBand &party_band(double ce) {
    QDROP_ABORT_IF(!(ce >= 0.0 && ce <= kFiveQubitBands.front().max_ce + 1e-9),
                   "CE value " + std::to_string(ce) +
                       " outside the five-qubit range [0, 0.625]");
    if (ce <= 0.0) {
        return kFiveQubitBands.back();
    }
    for (const auto &band : kFiveQubitBands) {
        if (ce > band.min_ce) {
            return band;
        }
    }
    return kFiveQubitBands.back();
}

EntanglementReport ce_statistics_of_pool(std::span<const StateVector> pool) {
    QDROP_ABORT_IF(pool.empty(), "empty state pool");
    std::vector<double> ce(pool.size());
    parallel_for(pool.size(), [&](std::size_t i) {
        ce[i] = concentrable_entanglement(pool[i]);
    });
    const auto n = static_cast<double>(ce.size());
    double mean = 0.0;
    for (double c : ce) {
        mean += c;
    }
    mean /= n;
    double var = 0.0;
    for (double c : ce) {
        var += (c - mean) * (c - mean);
    }
    EntanglementReport report;
    report.mean_ce = mean;
    report.var_ce = var / n;
    report.n_states = ce.size();
    const std::size_t qubits = pool.front().n_qubits();
    report.haar_mean = haar_ce_mean(qubits);
    report.haar_var_order = haar_ce_variance_order(qubits);
    if (qubits == 5) {
        report.party_band = party_band(std::max(0.0, mean)).structure;
    }
    return report;
}

EntanglementReport ce_statistics(const CircuitTemplate &tmpl,
                                 const DropoutConfig &dropout,
                                 const Inputs &inputs,
                                 std::size_t n_param_vectors,
                                 std::size_t n_data, Rng &rng) {
    const auto pool =
        circuit_state_pool(tmpl, dropout, inputs, n_param_vectors, n_data, rng);
    auto report = ce_statistics_of_pool(pool);
    report.dropout = dropout;
    return report;
}

} // namespace qdrop
