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
#include "qdrop/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qdrop/error.hpp"

namespace qdrop {

Json real_to_json(double value) {
    if (std::isinf(value) && value > 0) {
        return "inf";
    }
    QDROP_ABORT_IF(!std::isfinite(value), "cannot serialize a non-finite real");
    return value;
}

double real_from_json(const Json &value) {
    if (value.is_string()) {
        const auto text = value.get<std::string>();
        QDROP_ABORT_IF(text != "inf" && text != "infinity",
                       "expected a number or \"inf\", got \"" + text + "\"");
        return std::numeric_limits<double>::infinity();
    }
    QDROP_ABORT_IF(!value.is_number(), "expected a number, got " + value.dump());
    return value.get<double>();
}

std::string format_real(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

void reject_unknown_keys(const Json &doc, const std::set<std::string> &allowed,
                         const std::string &context) {
    QDROP_ABORT_IF(!doc.is_object(), context + ": expected a JSON object");
    for (const auto &[key, value] : doc.items()) {
        if (!allowed.contains(key)) {
            abort_with(context + ": unknown key \"" + key + "\"");
        }
    }
}

const std::set<std::string> &train_config_keys() {
    static const std::set<std::string> keys{
        "task",    "n-qubits", "n-layers",  "learning-rate",
        "epochs",  "strategy", "p-layer",   "p-rot",
        "p-ent",   "rescale-k", "base-seed", "n-runs",
        "seeds",   "adam-skip-dropped"};
    return keys;
}

Json dropout_to_json(const DropoutConfig &dropout) {
    return {{"strategy", strategy_name(dropout.strategy)},
            {"p-layer", dropout.p_layer},
            {"p-rot", dropout.p_rot},
            {"p-ent", dropout.p_ent}};
}

Json train_config_to_json(const TrainConfig &config) {
    Json doc = dropout_to_json(config.dropout);
    doc["task"] = task_name(config.task);
    doc["n-qubits"] = config.n_qubits;
    doc["n-layers"] = config.n_layers;
    doc["learning-rate"] = config.learning_rate;
    doc["epochs"] = config.epochs;
    doc["rescale-k"] =
        config.rescale_k ? real_to_json(*config.rescale_k) : Json(nullptr);
    doc["base-seed"] = config.base_seed;
    doc["n-runs"] = config.n_runs;
    doc["seeds"] = config.seeds;
    doc["adam-skip-dropped"] = config.adam_skip_dropped;
    return doc;
}

TrainConfig train_config_from_json(const Json &doc) {
    reject_unknown_keys(doc, train_config_keys(), "train config");
    const Task task = task_from_name(doc.value("task", std::string("sin")));
    TrainConfig c = TrainConfig::defaults(task);
    try {
        c.n_qubits = doc.value("n-qubits", c.n_qubits);
        c.n_layers = doc.value("n-layers", c.n_layers);
        c.learning_rate = doc.value("learning-rate", c.learning_rate);
        c.epochs = doc.value("epochs", c.epochs);
        c.dropout.strategy =
            strategy_from_name(doc.value("strategy", std::string("none")));
        c.dropout.p_layer = doc.value("p-layer", 0.0);
        c.dropout.p_rot = doc.value("p-rot", 0.0);
        c.dropout.p_ent = doc.value("p-ent", 0.0);
        if (doc.contains("rescale-k") && !doc["rescale-k"].is_null()) {
            c.rescale_k = real_from_json(doc["rescale-k"]);
        }
        c.base_seed = doc.value("base-seed", c.base_seed);
        c.n_runs = doc.value("n-runs", c.n_runs);
        c.seeds = doc.value("seeds", c.seeds);
        c.adam_skip_dropped =
            doc.value("adam-skip-dropped", c.adam_skip_dropped);
    } catch (const nlohmann::json::exception &e) {
        abort_with(std::string("train config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

Json reals(const std::vector<double> &values) {
    Json out = Json::array();
    for (double v : values) {
        out.push_back(real_to_json(v));
    }
    return out;
}

std::vector<double> reals_from(const Json &doc) {
    std::vector<double> out;
    for (const auto &v : doc) {
        out.push_back(real_from_json(v));
    }
    return out;
}

} // namespace

Json run_to_json(const TrainRun &run) {
    const auto &m = run.final_metrics;
    return {{"config", train_config_to_json(run.config)},
            {"seed", run.seed},
            {"train_loss", reals(run.train_loss)},
            {"test_loss", reals(run.test_loss)},
            {"train_accuracy", reals(run.train_accuracy)},
            {"test_accuracy", reals(run.test_accuracy)},
            {"initial_params", reals(run.initial_params)},
            {"final_params", reals(run.final_params)},
            {"final_metrics",
             {{"train_loss", m.train_loss},
              {"test_loss", m.test_loss},
              {"train_accuracy", m.train_accuracy},
              {"test_accuracy", m.test_accuracy}}},
            {"seconds", run.seconds}};
}

TrainRun run_from_json(const Json &doc) {
    TrainRun run;
    try {
        run.config = train_config_from_json(doc.at("config"));
        run.seed = doc.at("seed").get<std::uint64_t>();
        run.train_loss = reals_from(doc.at("train_loss"));
        run.test_loss = reals_from(doc.at("test_loss"));
        run.train_accuracy = reals_from(doc.at("train_accuracy"));
        run.test_accuracy = reals_from(doc.at("test_accuracy"));
        run.initial_params = reals_from(doc.at("initial_params"));
        run.final_params = reals_from(doc.at("final_params"));
        const auto &m = doc.at("final_metrics");
        run.final_metrics.train_loss = m.at("train_loss").get<double>();
        run.final_metrics.test_loss = m.at("test_loss").get<double>();
        run.final_metrics.train_accuracy = m.at("train_accuracy").get<double>();
        run.final_metrics.test_accuracy = m.at("test_accuracy").get<double>();
        run.seconds = doc.at("seconds").get<double>();
    } catch (const nlohmann::json::exception &e) {
        abort_with(std::string("run document: ") + e.what());
    }
    return run;
}

void write_curve_csv(const TrainRun &run, std::ostream &out) {
    const bool acc = !run.train_accuracy.empty();
    out << "epoch,train_loss,test_loss";
    if (acc) {
        out << ",train_accuracy,test_accuracy";
    }
    out << '\n';
    for (std::size_t e = 0; e < run.train_loss.size(); ++e) {
        out << e << ',' << format_real(run.train_loss[e]) << ','
            << format_real(run.test_loss[e]);
        if (acc) {
            out << ',' << format_real(run.train_accuracy[e]) << ','
                << format_real(run.test_accuracy[e]);
        }
        out << '\n';
    }
}

void write_aggregate_csv(const std::vector<Aggregate> &rows,
                         std::ostream &out) {
    out << kAggregateHeader << '\n';
    for (const auto &r : rows) {
        out << strategy_name(r.dropout.strategy) << ','
            << format_real(r.dropout.p_layer) << ','
            << format_real(r.dropout.p_rot) << ','
            << format_real(r.dropout.p_ent) << ',' << format_real(r.k) << ','
            << format_real(r.train_loss.mean) << ','
            << format_real(r.train_loss.std) << ','
            << format_real(r.test_loss.mean) << ','
            << format_real(r.test_loss.std) << ','
            << format_real(r.test_accuracy.mean) << ','
            << format_real(r.test_accuracy.std) << ',' << r.seed_count << '\n';
    }
}

Json aggregate_to_json(const Aggregate &row) {
    auto stats = [](const MetricStats &s) {
        return Json{{"mean", s.mean}, {"std", s.std}};
    };
    return {{"dropout", dropout_to_json(row.dropout)},
            {"k", real_to_json(row.k)},
            {"train_loss", stats(row.train_loss)},
            {"test_loss", stats(row.test_loss)},
            {"train_accuracy", stats(row.train_accuracy)},
            {"test_accuracy", stats(row.test_accuracy)},
            {"seed_count", row.seed_count}};
}

void write_dimension_csv(const ParameterDimensionCurve &curve,
                         std::ostream &out) {
    out << "layers,mean_D,mean_R\n";
    for (std::size_t i = 0; i < curve.layers.size(); ++i) {
        out << curve.layers[i] << ',' << format_real(curve.mean_D[i]) << ','
            << format_real(curve.mean_R[i]) << '\n';
    }
}

Json dimension_to_json(const ParameterDimensionCurve &curve) {
    return {{"family", family_name(curve.family)},
            {"layers", curve.layers},
            {"parameter_counts", curve.parameter_counts},
            {"mean_D", curve.mean_D},
            {"mean_R", curve.mean_R},
            {"D_max", curve.D_max},
            {"critical_layers", curve.critical_layers
                                    ? Json(*curve.critical_layers)
                                    : Json(nullptr)}};
}

Json expressibility_to_json(const ExpressibilityReport &report) {
    return {{"kl", report.kl},
            {"bins", report.bins},
            {"n_fidelities", report.n_fidelities},
            {"histogram", report.histogram},
            {"dropout", dropout_to_json(report.dropout)}};
}

Json entanglement_to_json(const EntanglementReport &report) {
    return {{"mean_ce", report.mean_ce},
            {"var_ce", report.var_ce},
            {"n_states", report.n_states},
            {"haar_mean", report.haar_mean},
            {"haar_var_order", report.haar_var_order},
            {"party_band", report.party_band},
            {"dropout", dropout_to_json(report.dropout)}};
}

Json mask_to_json(const DropoutMask &mask) {
    return {{"epoch", mask.epoch}, {"dropped", mask.ids()}};
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    QDROP_ABORT_IF(!in, "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        abort_with(path + ": " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    QDROP_ABORT_IF(!out, "cannot write " + path);
    out << text;
    QDROP_ABORT_IF(!out, "write failed for " + path);
}

} // namespace qdrop
