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
 * JSON and CSV persistence of configurations, runs and tables.
 *
 * Config documents use flat kebab-case keys and reject unknown keys.
 */
#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdrop/analysis.hpp"
#include "qdrop/training.hpp"

namespace qdrop {

using Json = nlohmann::json;

/// Doubles as JSON numbers; infinity becomes the string "inf".
Json real_to_json(double value);
double real_from_json(const Json &value);

/// Shortest text that parses back to the same double ("inf" for infinity).
std::string format_real(double value);

/// Throws when `doc` is not an object or carries a key outside `allowed`.
void reject_unknown_keys(const Json &doc, const std::set<std::string> &allowed,
                         const std::string &context);

/// Keys understood by train_config_from_json.
const std::set<std::string> &train_config_keys();

Json train_config_to_json(const TrainConfig &config);
/// Missing keys take the protocol defaults of the document's task.
TrainConfig train_config_from_json(const Json &doc);

Json dropout_to_json(const DropoutConfig &dropout);

Json run_to_json(const TrainRun &run);
TrainRun run_from_json(const Json &doc);

/// epoch,train_loss,test_loss[,train_accuracy,test_accuracy]
void write_curve_csv(const TrainRun &run, std::ostream &out);

inline constexpr const char *kAggregateHeader =
    "strategy,p_L,p_R,p_E,k,mean_train,std_train,mean_test,std_test,"
    "mean_acc,std_acc,seed_count";

/// Rows below kAggregateHeader; the accuracy columns hold test accuracy.
void write_aggregate_csv(const std::vector<Aggregate> &rows, std::ostream &out);

Json aggregate_to_json(const Aggregate &row);

/// layers,mean_D,mean_R
void write_dimension_csv(const ParameterDimensionCurve &curve,
                         std::ostream &out);
Json dimension_to_json(const ParameterDimensionCurve &curve);

Json expressibility_to_json(const ExpressibilityReport &report);
Json entanglement_to_json(const EntanglementReport &report);

/// {"epoch": e, "dropped": [ids]}
Json mask_to_json(const DropoutMask &mask);

Json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

} // namespace qdrop
