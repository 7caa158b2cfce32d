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
 * Exact derivatives of masked circuits.
 *
 * The production engine is a reverse (adjoint) sweep: one forward pass, then
 * the bra <psi|O U_after and the ket U_before|0> are walked back gate by gate,
 * so a full gradient costs a small constant times one circuit evaluation.
 * The parameter-shift rule is kept as an independent route.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qdrop/circuit_template.hpp"
#include "qdrop/loss.hpp"

namespace qdrop {

/// d<Z_0>/d theta for a single input, adjoint sweep.
std::vector<double> output_gradient(const CircuitTemplate &tmpl,
                                    std::span<const double> params,
                                    const DropoutMask &mask,
                                    std::span<const double> x);

/// d<Z_0>/d theta for a single input via shifted circuit evaluations: the
/// two-term +-pi/2 rule for Rx/Ry/Rz and the four-term rule for CRy, whose
/// generator has eigenvalues {0, +-1}.
std::vector<double> output_gradient_parameter_shift(
    const CircuitTemplate &tmpl, std::span<const double> params,
    const DropoutMask &mask, std::span<const double> x);

/// Gradient of the mean batch loss, adjoint sweep.
std::vector<double> gradient(const CircuitTemplate &tmpl,
                             std::span<const double> params,
                             const DropoutMask &mask,
                             std::span<const Sample> batch, LossKind loss);

std::vector<double> gradient_parameter_shift(const CircuitTemplate &tmpl,
                                             std::span<const double> params,
                                             const DropoutMask &mask,
                                             std::span<const Sample> batch,
                                             LossKind loss);

/// Adds weight(f) * d<Z_0>/d theta into grad for a prepared gate-indexed
/// half-angle table and returns f.
double accumulate_output_gradient(const CircuitTemplate &tmpl,
                                  std::span<const HalfAngle> table,
                                  const DropoutMask &mask,
                                  const std::function<double(double)> &weight,
                                  std::span<double> grad);

/// <Z_0> for a prepared table.
double evaluate_output(const CircuitTemplate &tmpl,
                       std::span<const HalfAngle> table,
                       const DropoutMask &mask);

/// Relative singular value cut-off used for QFIM ranks.
inline constexpr double kRankTolerance = 1e-10;
/// Singular values at or below this count as zero whatever the scale, so
/// round-off in an all-zero QFIM does not register as rank.
inline constexpr double kRankAbsoluteFloor = 1e-12;

struct QfimReport {
    Eigen::MatrixXd matrix;
    std::size_t rank{0};
    double rank_tolerance{kRankTolerance};
    std::vector<double> x;
};

/// Quantum Fisher information of the unmasked circuit at (params, x).
QfimReport qfim(const CircuitTemplate &tmpl, std::span<const double> params,
                std::span<const double> x,
                double rank_tolerance = kRankTolerance);

/// Number of singular values above tolerance * largest singular value (and
/// above kRankAbsoluteFloor).
std::size_t qfim_rank(const Eigen::MatrixXd &matrix,
                      double tolerance = kRankTolerance);

/// Derivative statevectors |d_i psi>, one column per parameter slot.
Eigen::MatrixXcd state_jacobian(const CircuitTemplate &tmpl,
                                std::span<const double> params,
                                std::span<const double> x,
                                Eigen::VectorXcd *state_out = nullptr);

} // namespace qdrop
