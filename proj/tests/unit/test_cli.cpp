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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"

#include "qdrop/cli.hpp"
#include "qdrop/io.hpp"
#include "qdrop/plot.hpp"

using namespace qdrop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qdrop");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("qdrop_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path &dir, const Json &doc) {
    const auto path = (dir / "config_in.json").string();
    write_text_file(path, doc.dump());
    return path;
}

std::size_t count_lines(const fs::path &p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        ++n;
    }
    return n;
}

const Json kTinySin{{"task", "sin"}, {"n-layers", 1}, {"epochs", 5}, {"n-runs", 2}};

} // namespace

TEST_CASE("cli rejects missing or broken configs", "[cli]") {
    CHECK(cli({"train"}).code != 0);
    CHECK(cli({}).code != 0);
    const auto missing = cli({"train", "--config", "/nonexistent/qdrop.json"});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("qdrop: ", 0) == 0);

    const auto dir = scratch("broken");
    Json doc = kTinySin;
    doc["learning_rate"] = 0.1;
    const auto r = cli({"train", "--config", write_config(dir, doc)});
    CHECK(r.code == 1);
    CHECK(r.err.find("learning_rate") != std::string::npos);
}

TEST_CASE("the installed binary reports failures through its exit code",
          "[cli]") {
    const char *bin = std::getenv("QDROP_CLI");
    if (bin == nullptr) {
        SKIP("QDROP_CLI not set");
    }
    const std::string cmd = std::string(bin) + " train > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) != 0);
    const std::string help = std::string(bin) + " --help > /dev/null 2>&1";
    CHECK(std::system(help.c_str()) == 0);
}

TEST_CASE("train dry run prints the resolved config", "[cli]") {
    const auto dir = scratch("dry");
    const auto r = cli({"train", "--config", write_config(dir, kTinySin),
                        "--seeds", "3,4", "--dry-run", "--out",
                        (dir / "out").string()});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["epochs"] == 5);
    CHECK(j["learning-rate"] == 0.01);
    CHECK(j["seeds"] == Json::array({3, 4}));
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("train writes runs, curves, masks and the aggregate", "[cli]") {
    const auto dir = scratch("train");
    Json doc = kTinySin;
    doc["strategy"] = "rotation";
    doc["p-layer"] = 0.5;
    doc["p-rot"] = 0.5;
    const auto out = dir / "out";
    const auto r = cli({"train", "--config", write_config(dir, doc), "--out",
                        out.string(), "--audit-masks"});
    REQUIRE(r.code == 0);
    for (const char *f : {"config.json", "run_0.json", "run_1.json", "curve_0.csv",
                          "masks_1.jsonl", "aggregate.csv"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(count_lines(out / "masks_0.jsonl") == 5);
    CHECK(count_lines(out / "curve_1.csv") == 7);
    const auto agg = read_csv_file((out / "aggregate.csv").string());
    CHECK(agg.numeric("seed_count").front() == 2.0);
    const auto run = run_from_json(read_json_file((out / "run_1.json").string()));
    CHECK(run.seed == 1);
    CHECK(run.train_loss.size() == 6);
}

TEST_CASE("gridsearch over a single cell", "[cli]") {
    const auto dir = scratch("grid");
    Json doc{{"task", "sin"},        {"n-layers", 6},
             {"epochs", 2},          {"n-runs", 1},
             {"strategy", "rotation"}, {"p-layer-grid", {0.1}},
             {"p-gate-grid", {0.2}}};
    const auto out = dir / "out";
    const auto r = cli({"gridsearch", "--config", write_config(dir, doc), "--out",
                        out.string()});
    REQUIRE(r.code == 0);
    const auto tab = read_csv_file((out / "gridsearch.csv").string());
    CHECK(tab.rows.size() == 1);
    const auto best = read_json_file((out / "best.json").string());
    CHECK(best["config"]["p-rot"] == 0.2);
}

TEST_CASE("gridsearch refuses grids outside the drop budget", "[cli]") {
    const auto dir = scratch("budget");
    Json doc{{"task", "sin"},          {"n-layers", 1},
             {"strategy", "rotation"}, {"p-layer-grid", {0.5}},
             {"p-gate-grid", {0.5}}};
    const auto r = cli({"gridsearch", "--config", write_config(dir, doc),
                        "--dry-run"});
    CHECK(r.code == 1);
    CHECK(r.err.find("drop budget") != std::string::npos);
}

TEST_CASE("rescale-eval at k = inf reproduces plain training", "[cli]") {
    const auto dir = scratch("rescale");
    Json doc = kTinySin;
    doc["n-layers"] = 6;
    doc["strategies"] = {"rotation"};
    doc["p-layer"] = 0.2;
    doc["p-gate"] = 0.3;
    doc["k-grid"] = {"inf", 2};
    const auto out = dir / "out";
    REQUIRE(cli({"rescale-eval", "--config", write_config(dir, doc), "--out",
                 out.string()})
                .code == 0);
    const auto tab = read_csv_file((out / "rescale.csv").string());
    REQUIRE(tab.rows.size() == 2);
    CHECK(tab.text("k")[0] == "inf");

    Json plain = kTinySin;
    plain["n-layers"] = 6;
    plain["strategy"] = "rotation";
    plain["p-layer"] = 0.2;
    plain["p-rot"] = 0.3;
    const auto plain_dir = scratch("rescale_plain");
    REQUIRE(cli({"train", "--config", write_config(plain_dir, plain), "--out",
                 (plain_dir / "out").string()})
                .code == 0);
    const auto agg = read_csv_file((plain_dir / "out" / "aggregate.csv").string());
    CHECK(tab.text("mean_test")[0] == agg.text("mean_test")[0]);
    CHECK(tab.text("mean_train")[0] == agg.text("mean_train")[0]);

    doc["k-grid"] = Json::array();
    const auto empty = cli({"rescale-eval", "--config", write_config(dir, doc)});
    CHECK(empty.code == 1);
    CHECK(empty.err.find("empty k grid") != std::string::npos);
}

TEST_CASE("analyze writes curves and pool statistics", "[cli]") {
    const auto dir = scratch("analyze");
    Json over{{"family", "regression"}, {"layers", {1}}, {"n-theta", 1},
              {"unit-inputs", true}};
    REQUIRE(cli({"analyze", "--config", write_config(dir, over), "--out",
                 (dir / "over").string()})
                .code == 0);
    const auto curve = read_csv_file((dir / "over" / "overparam.csv").string());
    CHECK(curve.numeric("mean_D").front() == 10.0);

    Json expr{{"family", "empty"}, {"n-param-vectors", 20}, {"n-data", 5}};
    const auto r = cli({"analyze", "--kind", "expressibility", "--config",
                        write_config(dir, expr), "--out", (dir / "expr").string()});
    REQUIRE(r.code == 0);
    const auto tab = read_csv_file((dir / "expr" / "expressibility.csv").string());
    CHECK(tab.numeric("ce_mean").front() == 0.0);
    CHECK(tab.numeric("kl").front() > 100.0);

    Json bad{{"kind", "beauty"}};
    CHECK(cli({"analyze", "--config", write_config(dir, bad)}).code == 1);
}

TEST_CASE("plot renders CSV columns", "[cli]") {
    const auto dir = scratch("plot");
    write_text_file((dir / "c.csv").string(), "epoch,a,b\n0,1,2\n1,0.5,1\n");
    write_text_file((dir / "bad.csv").string(), "epoch,a\n0,1\n1\n");
    Json doc{{"inputs", {(dir / "c.csv").string()}},
             {"output", (dir / "c.svg").string()}};
    REQUIRE(cli({"plot", "--config", write_config(dir, doc)}).code == 0);
    std::ifstream in(dir / "c.svg");
    const std::string svg((std::istreambuf_iterator<char>(in)), {});
    CHECK(svg.find("<polyline") != std::string::npos);

    doc["inputs"] = {(dir / "bad.csv").string()};
    CHECK(cli({"plot", "--config", write_config(dir, doc)}).code == 1);
}
