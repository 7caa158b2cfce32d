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
#include "qdrop/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdrop/analysis.hpp"
#include "qdrop/circuits.hpp"
#include "qdrop/datagen.hpp"
#include "qdrop/error.hpp"
#include "qdrop/io.hpp"
#include "qdrop/parallel.hpp"
#include "qdrop/plot.hpp"
#include "qdrop/training.hpp"

namespace fs = std::filesystem;

namespace qdrop {

namespace {

struct Options {
    std::string config;
    std::string out;
    std::vector<std::uint64_t> seeds;
    bool dry_run{false};
    bool audit_masks{false};
    std::string kind;
};

using KeySet = std::set<std::string>;

KeySet operator+(KeySet a, const KeySet &b) {
    a.insert(b.begin(), b.end());
    return a;
}

KeySet operator-(KeySet a, const KeySet &b) {
    for (const auto &k : b) {
        a.erase(k);
    }
    return a;
}

/// The part of `doc` that train_config_from_json understands, minus `skip`.
Json train_part(const Json &doc, const KeySet &skip = {}) {
    Json part = Json::object();
    for (const auto &[key, value] : doc.items()) {
        if (train_config_keys().contains(key) && !skip.contains(key)) {
            part[key] = value;
        }
    }
    return part;
}

template <typename T>
T get_or(const Json &doc, const std::string &key, T fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        abort_with("config key \"" + key + "\": " + e.what());
    }
}

std::vector<double> reals_or(const Json &doc, const std::string &key,
                             std::vector<double> fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    QDROP_ABORT_IF(!doc[key].is_array(),
                   "config key \"" + key + "\" must be an array");
    std::vector<double> out;
    for (const auto &v : doc[key]) {
        out.push_back(real_from_json(v));
    }
    return out;
}

Json reals_json(const std::vector<double> &values) {
    Json out = Json::array();
    for (double v : values) {
        out.push_back(real_to_json(v));
    }
    return out;
}

std::vector<double> tenths(int from, int to) {
    std::vector<double> out;
    for (int i = from; i <= to; ++i) {
        out.push_back(i / 10.0);
    }
    return out;
}

fs::path output_dir(const Options &opt, const Json &doc) {
    if (!opt.out.empty()) {
        return opt.out;
    }
    return get_or<std::string>(doc, "out", "results");
}

void prepare_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    QDROP_ABORT_IF(ec, "cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path &path, const Json &doc) {
    write_text_file(path.string(), doc.dump(2) + "\n");
}

template <typename Fn> void write_stream(const fs::path &path, Fn &&fn) {
    std::ostringstream s;
    fn(s);
    write_text_file(path.string(), s.str());
}

void apply_seeds(const Options &opt, TrainConfig &config) {
    if (!opt.seeds.empty()) {
        config.seeds = opt.seeds;
    }
}

// ---------------------------------------------------------------- train

int cmd_train(const Options &opt, std::ostream &out) {
    const Json doc = read_json_file(opt.config);
    reject_unknown_keys(doc, train_config_keys() + KeySet{"data-seed", "out"},
                        "train config");
    TrainConfig config = train_config_from_json(train_part(doc));
    apply_seeds(opt, config);
    const auto data_seed = get_or<std::uint64_t>(doc, "data-seed", 0);
    const fs::path dir = output_dir(opt, doc);

    Json resolved = train_config_to_json(config);
    resolved["data-seed"] = data_seed;
    resolved["out"] = dir.string();
    if (opt.dry_run) {
        out << resolved.dump(2) << '\n';
        return 0;
    }

    const auto data = make_task_dataset(config.task, data_seed);
    const auto seeds = config.run_seed_list();
    std::vector<TrainRun> runs(seeds.size());
    std::vector<std::string> mask_logs(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        MaskObserver observer;
        if (opt.audit_masks) {
            observer = [&log = mask_logs[i]](const DropoutMask &m) {
                log += mask_to_json(m).dump() + "\n";
            };
        }
        runs[i] = train(config, data, seeds[i], observer);
    });

    prepare_dir(dir);
    write_json(dir / "config.json", resolved);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const std::string tag = std::to_string(seeds[i]);
        write_json(dir / ("run_" + tag + ".json"), run_to_json(runs[i]));
        write_stream(dir / ("curve_" + tag + ".csv"),
                     [&](std::ostream &s) { write_curve_csv(runs[i], s); });
        if (opt.audit_masks) {
            write_text_file((dir / ("masks_" + tag + ".jsonl")).string(),
                            mask_logs[i]);
        }
    }
    const auto agg = aggregate_runs(runs, config.dropout,
                                    config.rescale_k.value_or(kNoRescale));
    write_stream(dir / "aggregate.csv",
                 [&](std::ostream &s) { write_aggregate_csv({agg}, s); });
    out << "train " << task_name(config.task) << ": " << seeds.size()
        << " run(s), mean test loss " << format_real(agg.test_loss.mean)
        << " -> " << dir.string() << '\n';
    return 0;
}

// ----------------------------------------------------------- gridsearch

int cmd_gridsearch(const Options &opt, std::ostream &out) {
    const Json doc = read_json_file(opt.config);
    const KeySet grid_keys{"p-layer-grid", "p-gate-grid", "p-rot-grid",
                           "p-ent-grid", "data-seed", "out"};
    reject_unknown_keys(doc,
                        train_config_keys() -
                                KeySet{"p-layer", "p-rot", "p-ent"} +
                            grid_keys,
                        "gridsearch config");
    TrainConfig base = train_config_from_json(train_part(doc));
    apply_seeds(opt, base);
    QDROP_ABORT_IF(base.dropout.strategy == Strategy::None,
                   "gridsearch config needs a dropout strategy");
    GridSpec grid;
    grid.p_layer = reals_or(doc, "p-layer-grid", tenths(1, 7));
    if (base.dropout.strategy == Strategy::Independent) {
        grid.p_rot = reals_or(doc, "p-rot-grid", tenths(1, 9));
        grid.p_ent = reals_or(doc, "p-ent-grid", tenths(1, 9));
    } else {
        grid.p_gate = reals_or(doc, "p-gate-grid", tenths(1, 9));
    }
    const auto data_seed = get_or<std::uint64_t>(doc, "data-seed", 0);
    const fs::path dir = output_dir(opt, doc);

    Json resolved = train_config_to_json(base);
    for (const char *k : {"p-layer", "p-rot", "p-ent"}) {
        resolved.erase(k);
    }
    resolved["p-layer-grid"] = reals_json(grid.p_layer);
    if (base.dropout.strategy == Strategy::Independent) {
        resolved["p-rot-grid"] = reals_json(grid.p_rot);
        resolved["p-ent-grid"] = reals_json(grid.p_ent);
    } else {
        resolved["p-gate-grid"] = reals_json(grid.p_gate);
    }
    resolved["data-seed"] = data_seed;
    resolved["out"] = dir.string();
    // Surfaces an empty effective grid before anything runs.
    const auto cells = grid_cells(base, grid);
    if (opt.dry_run) {
        resolved["cells"] = cells.size();
        out << resolved.dump(2) << '\n';
        return 0;
    }

    const auto data = make_task_dataset(base.task, data_seed);
    const auto table = grid_search(base, data, grid);
    prepare_dir(dir);
    write_json(dir / "config.json", resolved);
    write_stream(dir / "gridsearch.csv",
                 [&](std::ostream &s) { write_aggregate_csv(table, s); });
    TrainConfig best_config = base;
    best_config.dropout = table.front().dropout;
    write_json(dir / "best.json",
               {{"aggregate", aggregate_to_json(table.front())},
                {"config", train_config_to_json(best_config)}});
    const auto &b = table.front().dropout;
    out << "gridsearch " << strategy_name(b.strategy) << ": " << table.size()
        << " cell(s), best p_L=" << format_real(b.p_layer)
        << " p_R=" << format_real(b.p_rot) << " p_E=" << format_real(b.p_ent)
        << " mean test loss " << format_real(table.front().test_loss.mean)
        << '\n';
    return 0;
}

// -------------------------------------------------------------- analyze

DropoutConfig dropout_from(const Json &doc) {
    DropoutConfig d;
    d.strategy = strategy_from_name(get_or<std::string>(doc, "strategy", "none"));
    d.p_layer = get_or(doc, "p-layer", 0.0);
    d.p_rot = get_or(doc, "p-rot", 0.0);
    d.p_ent = get_or(doc, "p-ent", 0.0);
    d.validate();
    return d;
}

int cmd_analyze(const Options &opt, std::ostream &out) {
    const Json doc = read_json_file(opt.config);
    reject_unknown_keys(doc,
                        {"kind", "family", "n-qubits", "layers", "n-theta",
                         "unit-inputs", "task", "data-seed", "seed",
                         "strategy", "p-layer", "p-rot", "p-ent",
                         "n-param-vectors", "n-data", "bins", "out"},
                        "analyze config");
    std::string kind = opt.kind.empty()
                           ? get_or<std::string>(doc, "kind", "overparam")
                           : opt.kind;
    QDROP_ABORT_IF(kind != "overparam" && kind != "expressibility" &&
                       kind != "entanglement",
                   "unknown analysis kind \"" + kind + "\"");
    // "empty" names the gateless template (the custom family).
    const auto family_text = get_or<std::string>(doc, "family", "regression");
    const CircuitFamily family = family_text == "empty"
                                     ? CircuitFamily::Custom
                                     : family_from_name(family_text);
    const auto n_qubits = get_or<std::size_t>(doc, "n-qubits", 5);
    const Task task = task_from_name(get_or<std::string>(
        doc, "task", family == CircuitFamily::Classification ? "moons" : "sin"));
    const bool overparam = kind == "overparam";
    std::vector<std::size_t> default_layers;
    if (overparam) {
        for (std::size_t L = 1; L <= 10; ++L) {
            default_layers.push_back(L);
        }
    } else {
        default_layers = {10};
    }
    auto layers = get_or(doc, "layers", default_layers);
    if (family == CircuitFamily::Custom) {
        QDROP_ABORT_IF(overparam, "overparam needs a layered circuit family");
        layers = {0};
    }
    QDROP_ABORT_IF(layers.empty(), "empty layer range");
    const auto n_theta = get_or<std::size_t>(doc, "n-theta", 10);
    const bool unit_inputs = get_or(doc, "unit-inputs", false);
    const auto data_seed = get_or<std::uint64_t>(doc, "data-seed", 0);
    auto seed = get_or<std::uint64_t>(doc, "seed", 0);
    if (!opt.seeds.empty()) {
        seed = opt.seeds.front();
    }
    const DropoutConfig dropout = dropout_from(doc);
    const auto n_vectors = get_or<std::size_t>(doc, "n-param-vectors", 1000);
    const auto n_data = get_or<std::size_t>(doc, "n-data", 15);
    const auto bins = get_or<std::size_t>(doc, "bins", kDefaultBins);
    const fs::path dir = output_dir(opt, doc);

    Json resolved = dropout_to_json(dropout);
    resolved.update({{"kind", kind},
                     {"family", family_name(family)},
                     {"n-qubits", n_qubits},
                     {"layers", layers},
                     {"task", task_name(task)},
                     {"data-seed", data_seed},
                     {"seed", seed},
                     {"out", dir.string()}});
    if (overparam) {
        resolved.update({{"n-theta", n_theta}, {"unit-inputs", unit_inputs}});
    } else {
        resolved.update({{"n-param-vectors", n_vectors},
                         {"n-data", n_data},
                         {"bins", bins}});
    }
    if (opt.dry_run) {
        out << resolved.dump(2) << '\n';
        return 0;
    }

    Inputs inputs = make_task_dataset(task, data_seed).train_inputs();
    const std::size_t arity = inputs.front().size();
    if (unit_inputs) {
        inputs = {std::vector<double>(arity, 1.0),
                  std::vector<double>(arity, -1.0)};
    }
    Rng rng(seed);
    prepare_dir(dir);
    write_json(dir / "config.json", resolved);

    if (overparam) {
        const auto curve = parameter_dimension_curve(family, n_qubits, layers,
                                                     inputs, n_theta, rng);
        write_json(dir / "overparam.json", dimension_to_json(curve));
        write_stream(dir / "overparam.csv",
                     [&](std::ostream &s) { write_dimension_csv(curve, s); });
        out << "overparam " << family_name(family) << ": D_max " << curve.D_max
            << ", plateau from "
            << (curve.critical_layers
                    ? std::to_string(*curve.critical_layers) + " layers"
                    : std::string("no layer count"))
            << '\n';
        return 0;
    }

    Json reports = Json::array();
    std::ostringstream csv;
    csv << "layers,kl,ce_mean,ce_var\n";
    for (std::size_t L : layers) {
        const auto tmpl = family == CircuitFamily::Custom
                              ? build_empty(n_qubits, arity)
                              : build_family(family, n_qubits, L);
        const auto pool =
            circuit_state_pool(tmpl, dropout, inputs, n_vectors, n_data, rng);
        auto expr = expressibility_of_pool(pool, pool.size(), bins, rng);
        expr.dropout = dropout;
        auto ent = ce_statistics_of_pool(pool);
        ent.dropout = dropout;
        reports.push_back({{"layers", L},
                           {"expressibility", expressibility_to_json(expr)},
                           {"entanglement", entanglement_to_json(ent)}});
        csv << L << ',' << format_real(expr.kl) << ','
            << format_real(ent.mean_ce) << ',' << format_real(ent.var_ce)
            << '\n';
        out << kind << " layers=" << L << ": KL " << format_real(expr.kl)
            << ", CE mean " << format_real(ent.mean_ce) << " var "
            << format_real(ent.var_ce) << '\n';
    }
    write_json(dir / (kind + ".json"), reports);
    write_text_file((dir / (kind + ".csv")).string(), csv.str());
    return 0;
}

// --------------------------------------------------------- rescale-eval

int cmd_rescale_eval(const Options &opt, std::ostream &out) {
    const Json doc = read_json_file(opt.config);
    reject_unknown_keys(doc,
                        train_config_keys() - KeySet{"strategy", "rescale-k"} +
                            KeySet{"strategies", "p-gate", "k-grid",
                                   "data-seed", "out"},
                        "rescale-eval config");
    TrainConfig base = train_config_from_json(
        train_part(doc, {"p-layer", "p-rot", "p-ent"}));
    apply_seeds(opt, base);
    const auto names = get_or<std::vector<std::string>>(
        doc, "strategies", {"rotation", "entangling", "independent"});
    const double p_layer = get_or(doc, "p-layer", 0.2);
    const double p_gate = get_or(doc, "p-gate", 0.3);
    const double p_rot = get_or(doc, "p-rot", 0.3);
    const double p_ent = get_or(doc, "p-ent", 0.3);
    const auto k_grid =
        reals_or(doc, "k-grid", {1.0, 2.0, 4.0, 8.0, kNoRescale});
    QDROP_ABORT_IF(k_grid.empty(), "empty k grid");
    QDROP_ABORT_IF(names.empty(), "no strategies to evaluate");
    for (double k : k_grid) {
        QDROP_ABORT_IF(!(k > 0.0), "k values must be positive");
    }
    std::vector<DropoutConfig> configs;
    for (const auto &name : names) {
        DropoutConfig d;
        d.strategy = strategy_from_name(name);
        QDROP_ABORT_IF(d.strategy == Strategy::None,
                       "rescale-eval needs dropout strategies");
        d.p_layer = p_layer;
        if (d.strategy == Strategy::Independent) {
            d.p_rot = p_rot;
            d.p_ent = p_ent;
        } else if (d.strategy == Strategy::Entangling) {
            d.p_ent = p_gate;
        } else {
            d.p_rot = p_gate;
        }
        d.validate();
        configs.push_back(d);
    }
    const auto data_seed = get_or<std::uint64_t>(doc, "data-seed", 0);
    const fs::path dir = output_dir(opt, doc);

    Json resolved = train_config_to_json(base);
    for (const char *k : {"strategy", "rescale-k"}) {
        resolved.erase(k);
    }
    resolved.update({{"strategies", names},
                     {"p-layer", p_layer},
                     {"p-gate", p_gate},
                     {"p-rot", p_rot},
                     {"p-ent", p_ent},
                     {"k-grid", reals_json(k_grid)},
                     {"data-seed", data_seed},
                     {"out", dir.string()}});
    if (opt.dry_run) {
        out << resolved.dump(2) << '\n';
        return 0;
    }

    const auto data = make_task_dataset(base.task, data_seed);
    const auto seeds = base.run_seed_list();
    const auto tmpl = build_family(base.family(), base.n_qubits, base.n_layers);
    std::vector<TrainRun> runs(configs.size() * seeds.size());
    parallel_for(runs.size(), [&](std::size_t job) {
        TrainConfig cfg = base;
        cfg.rescale_k.reset();
        cfg.dropout = configs[job / seeds.size()];
        runs[job] = train(cfg, data, seeds[job % seeds.size()]);
    });

    std::vector<Aggregate> rows;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        for (double k : k_grid) {
            std::vector<TrainRun> scaled(
                runs.begin() + static_cast<std::ptrdiff_t>(c * seeds.size()),
                runs.begin() +
                    static_cast<std::ptrdiff_t>((c + 1) * seeds.size()));
            for (auto &r : scaled) {
                r.final_metrics = evaluate_params(
                    tmpl, data, base.loss(),
                    rescale_for_dropout(tmpl, configs[c], r.final_params, k));
            }
            rows.push_back(aggregate_runs(scaled, configs[c], k));
        }
    }
    prepare_dir(dir);
    write_json(dir / "config.json", resolved);
    write_stream(dir / "rescale.csv",
                 [&](std::ostream &s) { write_aggregate_csv(rows, s); });
    out << "rescale-eval: " << configs.size() << " strateg"
        << (configs.size() == 1 ? "y" : "ies") << " x " << k_grid.size()
        << " k values -> " << (dir / "rescale.csv").string() << '\n';
    return 0;
}

// ----------------------------------------------------------------- plot

int cmd_plot(const Options &opt, std::ostream &out) {
    const Json doc = read_json_file(opt.config);
    reject_unknown_keys(doc,
                        {"inputs", "output", "mode", "x", "y", "error", "label",
                         "title", "x-label", "y-label", "log-y"},
                        "plot config");
    const auto inputs = get_or<std::vector<std::string>>(doc, "inputs", {});
    QDROP_ABORT_IF(inputs.empty(), "plot config needs at least one input CSV");
    const auto mode = get_or<std::string>(doc, "mode", "line");
    QDROP_ABORT_IF(mode != "line" && mode != "bar",
                   "plot mode must be line or bar");
    ChartStyle style;
    style.title = get_or<std::string>(doc, "title", "");
    style.x_label = get_or<std::string>(doc, "x-label", "");
    style.y_label = get_or<std::string>(doc, "y-label", "");
    style.log_y = get_or(doc, "log-y", false);
    fs::path output = get_or<std::string>(doc, "output", "plot.svg");
    if (!opt.out.empty()) {
        output = fs::path(opt.out) / output.filename();
    }
    if (opt.dry_run) {
        out << doc.dump(2) << '\n';
        return 0;
    }

    std::vector<CsvTable> tables;
    for (const auto &path : inputs) {
        tables.push_back(read_csv_file(path));
    }
    std::string svg;
    if (mode == "line") {
        std::vector<Series> series;
        for (std::size_t t = 0; t < tables.size(); ++t) {
            const auto &tab = tables[t];
            const auto x_name = get_or<std::string>(doc, "x", tab.header.front());
            std::vector<std::string> y_names =
                get_or<std::vector<std::string>>(doc, "y", {});
            if (y_names.empty()) {
                for (const auto &h : tab.header) {
                    if (h != x_name) {
                        y_names.push_back(h);
                    }
                }
            }
            const auto x = tab.numeric(x_name);
            for (const auto &y : y_names) {
                const std::string label =
                    tables.size() > 1
                        ? fs::path(inputs[t]).stem().string() + ":" + y
                        : y;
                series.push_back({label, x, tab.numeric(y)});
            }
        }
        svg = render_line_svg(series, style);
    } else {
        std::vector<Bar> bars;
        for (const auto &tab : tables) {
            const auto label_name =
                get_or<std::string>(doc, "label", tab.header.front());
            const auto y_name = get_or<std::string>(doc, "y", "mean_test");
            const auto labels = tab.text(label_name);
            const auto values = tab.numeric(y_name);
            std::vector<double> errors(values.size(), 0.0);
            if (doc.contains("error")) {
                errors = tab.numeric(doc["error"].get<std::string>());
            }
            for (std::size_t i = 0; i < values.size(); ++i) {
                bars.push_back({labels[i], values[i], errors[i]});
            }
        }
        svg = render_bar_svg(bars, style);
    }
    if (output.has_parent_path()) {
        prepare_dir(output.parent_path());
    }
    write_text_file(output.string(), svg);
    out << "plot -> " << output.string() << '\n';
    return 0;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Quantum dropout experiments", "qdrop"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config, "JSON config document")
            ->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seeds", opt.seeds, "comma separated run seeds")
            ->delimiter(',');
        sub->add_flag("--dry-run", opt.dry_run,
                      "print the resolved config and exit");
        sub->add_flag("--audit-masks", opt.audit_masks,
                      "log every sampled dropout mask");
    };
    auto *train_cmd = app.add_subcommand("train", "train QNNs with dropout");
    auto *grid_cmd = app.add_subcommand("gridsearch", "drop-rate grid search");
    auto *analyze_cmd =
        app.add_subcommand("analyze", "overparam, expressibility, entanglement");
    auto *rescale_cmd =
        app.add_subcommand("rescale-eval", "test metrics versus rescaling root k");
    auto *plot_cmd = app.add_subcommand("plot", "SVG chart from CSV files");
    for (auto *sub : {train_cmd, grid_cmd, analyze_cmd, rescale_cmd, plot_cmd}) {
        add_common(sub);
    }
    analyze_cmd->add_option("--kind", opt.kind,
                            "overparam, expressibility or entanglement");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    try {
        if (train_cmd->parsed()) {
            return cmd_train(opt, out);
        }
        if (grid_cmd->parsed()) {
            return cmd_gridsearch(opt, out);
        }
        if (analyze_cmd->parsed()) {
            return cmd_analyze(opt, out);
        }
        if (rescale_cmd->parsed()) {
            return cmd_rescale_eval(opt, out);
        }
        return cmd_plot(opt, out);
    } catch (const std::exception &e) {
        err << "qdrop: " << e.what() << '\n';
        return 1;
    }
}

} // namespace qdrop
