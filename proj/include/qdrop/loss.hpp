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
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

namespace qdrop {

enum class LossKind { MSE, CCE };

/// Probabilities entering the cross entropy are clamped to this margin.
inline constexpr double kProbabilityClamp = 1e-12;

/// Class-1 probability read off a Z expectation.
inline double class_probability(double z) { return 0.5 * (1.0 + z); }

/// One labelled input.
struct Sample {
    std::vector<double> x;
    double y{0.0};
};

/// Per-sample loss as a function of the raw model output f = <Z>.
inline double sample_loss(LossKind kind, double f, double y) {
    if (kind == LossKind::MSE) {
        return (f - y) * (f - y);
    }
    const double p =
        std::clamp(class_probability(f), kProbabilityClamp,
                   1.0 - kProbabilityClamp);
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

/// d(sample_loss)/df. Zero where the clamp is active.
inline double sample_loss_derivative(LossKind kind, double f, double y) {
    if (kind == LossKind::MSE) {
        return 2.0 * (f - y);
    }
    const double p = class_probability(f);
    if (p <= kProbabilityClamp || p >= 1.0 - kProbabilityClamp) {
        return 0.0;
    }
    return 0.5 * (-y / p + (1.0 - y) / (1.0 - p));
}

} // namespace qdrop
