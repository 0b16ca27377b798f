// Copyright 2026 The MAIFormer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "maiformer/cli/commands.hpp"
#include "maiformer/data/dataset_io.hpp"
#include "maiformer/data/normalizer.hpp"
#include "maiformer/data/raw_track.hpp"
#include "maiformer/data/scene.hpp"
#include "maiformer/model/checkpoint.hpp"
#include "test_support.hpp"

using namespace maiformer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = maiformer::cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string bytes(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path &p) { return json::parse(bytes(p)); }

void write(const fs::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// One shared pipeline run: synth -> prepare -> train (full and MMA-only).
struct Pipeline {
    fs::path root = testing::scratch_dir("cli");
    fs::path tracks = root / "tracks", data = root / "data", run = root / "run", ablated = root / "ablated";
    fs::path config = root / "config.json";

    Pipeline() {
        write(config, R"({"model": {"d_model": 8, "layers": 1, "heads": 2, "ffn_hidden": 16, "decoder_widths": [16]},
                          "train": {"epochs": 12, "batch_size": 16, "learning_rate": 0.003, "patience": 12}})");
        REQUIRE(run_cli({"synth", "--scenes", "60", "--seed", "4", "--out", tracks.string()}).status == 0);
        REQUIRE(run_cli({"prepare", "--tracks", tracks.string(), "--out", data.string()}).status == 0);
        auto r = run_cli({"train", "--data", data.string(), "--config", config.string(), "--seed", "1", "--out",
                      run.string()});
        INFO(r.err);
        REQUIRE(r.status == 0);
        REQUIRE(run_cli({"train", "--data", data.string(), "--config", config.string(), "--seed", "1", "--ablation",
                     "mma-only", "--epochs", "2", "--out", ablated.string()})
                    .status == 0);
    }
};

const Pipeline &pipeline() {
    static const Pipeline p;
    return p;
}

} // namespace

TEST_SUITE("synth") {
    TEST_CASE("seed repeat writes identical tracks that parse back") {
        const auto dir = testing::scratch_dir("cli_synth");
        REQUIRE(run_cli({"synth", "--scenes", "20", "--seed", "9", "--out", (dir / "a").string()}).status == 0);
        REQUIRE(run_cli({"synth", "--scenes", "20", "--seed", "9", "--out", (dir / "b").string()}).status == 0);
        CHECK(bytes(dir / "a/tracks.csv") == bytes(dir / "b/tracks.csv"));
        const auto tracks = data::read_tracks_csv(dir / "a/tracks.csv");
        const auto m = read_json(dir / "a/manifest.json");
        CHECK(m["command"] == "synth");
        CHECK(m["tracks"].get<std::size_t>() == tracks.size());
        CHECK(m["seed"] == 9);
        CHECK(m["config"]["synthetic"]["num_scenes"] == 20);
    }

    TEST_CASE("zero scenes gives an empty file and a manifest") {
        const auto dir = testing::scratch_dir("cli_synth0");
        REQUIRE(run_cli({"synth", "--scenes", "0", "--out", dir.string()}).status == 0);
        CHECK(data::read_tracks_csv(dir / "tracks.csv").empty());
        CHECK(read_json(dir / "manifest.json")["tracks"] == 0);
    }

    TEST_CASE("config layering and rejection") {
        const auto dir = testing::scratch_dir("cli_synth_cfg");
        write(dir / "c.json", R"({"synthetic": {"num_scenes": 5, "seed": 3, "mean_agents": 2.0}})");
        REQUIRE(run_cli({"synth", "--config", (dir / "c.json").string(), "--seed", "8", "--out", (dir / "o").string()})
                    .status == 0);
        const auto m = read_json(dir / "o/manifest.json");
        CHECK(m["config"]["synthetic"]["num_scenes"] == 5);
        CHECK(m["config"]["synthetic"]["seed"] == 8);
        CHECK(m["config"]["synthetic"]["mean_agents"] == 2.0);
        write(dir / "bad.json", R"({"synthetic": {"num_scene": 5}})");
        auto r = run_cli({"synth", "--config", (dir / "bad.json").string(), "--out", (dir / "x").string()});
        CHECK(r.status != 0);
        CHECK(r.err.find("num_scene") != std::string::npos);
        write(dir / "bad2.json", R"({"optimizer": {}})");
        CHECK(run_cli({"synth", "--config", (dir / "bad2.json").string(), "--out", (dir / "x").string()}).status != 0);
    }

    TEST_CASE("usage errors") {
        CHECK(run_cli({}).status != 0);
        CHECK(run_cli({"synth"}).status != 0);
        CHECK(run_cli({"frobnicate", "--out", "x"}).status != 0);
        CHECK(run_cli({"--version"}).out.find("0.1.0") != std::string::npos);
    }
}

TEST_SUITE("prepare") {
    TEST_CASE("manifest counts match the files and the split rule") {
        const auto &p = pipeline();
        const auto m = read_json(p.data / "manifest.json");
        std::size_t total = 0;
        for (const char *split : {"train", "val", "test"}) {
            const auto scenes = data::read_scenes(p.data / (std::string(split) + ".jsonl"));
            CHECK(m["counts"][split].get<std::size_t>() == scenes.size());
            total += scenes.size();
        }
        const auto expect = data::split_counts(total);
        CHECK(m["counts"]["train"].get<std::size_t>() == expect.train);
        CHECK(m["counts"]["val"].get<std::size_t>() == expect.val);
        CHECK(m["counts"]["test"].get<std::size_t>() == expect.test);
        CHECK(m["norm_stats_hash"] == data::norm_stats_hash(data::load_norm_stats(p.data / "norm_stats.txt")));
    }

    TEST_CASE("rerun is bit-identical and leaves inputs alone") {
        const auto &p = pipeline();
        const auto before = bytes(p.tracks / "tracks.csv");
        const auto dir = testing::scratch_dir("cli_prepare_again");
        REQUIRE(run_cli({"prepare", "--tracks", (p.tracks / "tracks.csv").string(), "--out", dir.string()}).status == 0);
        for (const char *f : {"train.jsonl", "val.jsonl", "test.jsonl", "norm_stats.txt"}) {
            CHECK(bytes(dir / f) == bytes(p.data / f));
        }
        CHECK(bytes(p.tracks / "tracks.csv") == before);
    }

    TEST_CASE("missing or unusable input fails with the path") {
        const auto dir = testing::scratch_dir("cli_prepare_bad");
        auto r = run_cli({"prepare", "--tracks", (dir / "nope.csv").string(), "--out", (dir / "o").string()});
        CHECK(r.status == 1);
        CHECK(r.err.find("nope.csv") != std::string::npos);
        write(dir / "empty.csv", "flight_id,timestamp_s,lat_deg,lon_deg,alt_ft\n");
        CHECK(run_cli({"prepare", "--tracks", (dir / "empty.csv").string(), "--out", (dir / "o").string()}).status == 1);
    }
}

TEST_SUITE("train") {
    TEST_CASE("manifest records the stop and configs") {
        const auto &p = pipeline();
        const auto m = read_json(p.run / "manifest.json");
        CHECK(m["stop_reason"].is_string());
        CHECK(m["stop_epoch"].get<std::size_t>() + 1 == m["epochs_run"].get<std::size_t>());
        CHECK(m["config"]["model"]["d_model"] == 8);
        CHECK(m["config"]["model"]["past_steps"] == 20);
        CHECK(m["config"]["train"]["seed"] == 1);
        CHECK(fs::exists(p.run / "best.ckpt"));
        CHECK(fs::exists(p.run / "train_log.jsonl"));
    }

    TEST_CASE("ablation flag disables agent attention in the checkpoint") {
        const auto &p = pipeline();
        CHECK(model::inspect_checkpoint(p.ablated / "best.ckpt").header["config"]["agent_attention"] == false);
        CHECK(model::inspect_checkpoint(p.run / "best.ckpt").header["config"]["agent_attention"] == true);
    }

    TEST_CASE("seed repeat gives an identical best checkpoint") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_train_again");
        REQUIRE(run_cli({"train", "--data", p.data.string(), "--config", p.config.string(), "--seed", "1", "--ablation",
                     "mma-only", "--epochs", "2", "--out", dir.string()})
                    .status == 0);
        CHECK(bytes(dir / "best.ckpt") == bytes(p.ablated / "best.ckpt"));
    }

    TEST_CASE("64-bit training writes 8-byte elements") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_train_f64");
        REQUIRE(run_cli({"train", "--data", p.data.string(), "--config", p.config.string(), "--epochs", "1",
                     "--precision", "f64", "--out", dir.string()})
                    .status == 0);
        CHECK(model::inspect_checkpoint(dir / "best.ckpt").element_bytes == 8);
    }
}

TEST_SUITE("evaluate") {
    TEST_CASE("default horizons, consistent averages, comparison table") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_eval");
        auto r = run_cli({"evaluate", "--checkpoint", (p.run / "best.ckpt").string(), "--checkpoint",
                      (p.ablated / "best.ckpt").string(), "--data", p.data.string(), "--out", dir.string()});
        INFO(r.err);
        REQUIRE(r.status == 0);
        CHECK(r.out.find("PI (%)") != std::string::npos);
        const auto m = read_json(dir / "metrics.json");
        REQUIRE(m["reports"].size() == 2);
        CHECK(m["reports"][0]["model"] == "maiformer");
        CHECK(m["reports"][1]["model"] == "mma-only");
        const auto &rep = m["reports"][0];
        std::vector<std::size_t> h;
        for (const auto &row : rep["horizons"]) h.push_back(row["horizon"]);
        CHECK(h == std::vector<std::size_t>{1, 5, 10, 15, 20});
        for (const char *v : {"lat_deg", "lon_deg", "alt_ft"}) {
            double s = 0;
            for (const auto &row : rep["horizons"]) s += row["metrics"][v]["mae"].get<double>();
            CHECK(rep["average"][v]["mae"].get<double>() == doctest::Approx(s / 5).epsilon(1e-12));
        }
        CHECK(m["pi"].size() == 9);
    }

    TEST_CASE("training split scores better than test after fitting") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_eval_split");
        auto mae = [&](const std::string &split) {
            REQUIRE(run_cli({"evaluate", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(),
                         "--split", split, "--out", (dir / split).string()})
                        .status == 0);
            return read_json(dir / split / "metrics.json")["reports"][0]["all_steps"];
        };
        const auto train = mae("train"), test = mae("test");
        double tr = 0, te = 0;
        for (const char *v : {"lat_deg", "lon_deg"}) {
            tr += train[v]["mae"].get<double>();
            te += test[v]["mae"].get<double>();
        }
        CHECK(tr < te);
    }

    TEST_CASE("statistics mismatch and bad horizons are errors") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_eval_bad");
        fs::create_directories(dir / "data");
        for (const char *f : {"train.jsonl", "val.jsonl", "test.jsonl"}) fs::copy(p.data / f, dir / "data" / f);
        auto stats = data::load_norm_stats(p.data / "norm_stats.txt");
        stats.max[2] += 1.0;
        data::save_norm_stats(dir / "data/norm_stats.txt", stats);
        auto r = run_cli({"evaluate", "--checkpoint", (p.run / "best.ckpt").string(), "--data", (dir / "data").string(),
                      "--out", (dir / "o").string()});
        CHECK(r.status == 1);
        CHECK(r.err.find("do not match") != std::string::npos);
        CHECK(run_cli({"evaluate", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(),
                   "--horizons", "1,21", "--out", (dir / "o").string()})
                  .status == 1);
    }
}

TEST_SUITE("predict and dump-attention") {
    TEST_CASE("prediction matches the evaluation path and the scene's agent count") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_predict");
        const auto test = data::read_scenes(p.data / "test.jsonl");
        REQUIRE(!test.empty());
        const auto id = std::to_string(test[1].scene_id);
        REQUIRE(run_cli({"predict", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(), "--scene",
                     id, "--out", (dir / "p").string()})
                    .status == 0);
        REQUIRE(run_cli({"evaluate", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(),
                     "--save-predictions", "--out", (dir / "e").string()})
                    .status == 0);
        std::ifstream pin(dir / "p/predictions.jsonl");
        std::string line;
        std::getline(pin, line);
        const auto single = json::parse(line);
        CHECK(single["agents"].size() == test[1].agent_count());
        CHECK(single["agents"][0]["prediction"].size() == 20);
        std::ifstream ein(dir / "e/predictions.jsonl");
        std::getline(ein, line);
        std::getline(ein, line);
        CHECK(json::parse(line) == single);

        auto r = run_cli({"predict", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(),
                      "--scene", "999999999", "--out", (dir / "q").string()});
        CHECK(r.status == 1);
        CHECK(r.err.find("999999999") != std::string::npos);
    }

    TEST_CASE("attention dump rows sum to one") {
        const auto &p = pipeline();
        const auto dir = testing::scratch_dir("cli_attn");
        const auto test = data::read_scenes(p.data / "test.jsonl");
        const data::Scene *scene = &test[0];
        for (const auto &s : test)
            if (s.agent_count() > scene->agent_count()) scene = &s;
        REQUIRE(run_cli({"dump-attention", "--checkpoint", (p.run / "best.ckpt").string(), "--data", p.data.string(),
                     "--scene", std::to_string(scene->scene_id), "--query", "0", "--out", dir.string()})
                    .status == 0);
        const auto doc = read_json(dir / "attention.json");
        for (const auto &view : doc["views"]) {
            double total = 0;
            for (const auto &s : view["scores"]) total += s["score"].get<double>();
            CHECK(std::abs(total - 1.0) < 1e-6);
            CHECK(view["scores"].size() == scene->agent_count());
        }
        for (const auto &layer : doc["variate_attention"])
            for (const auto &agent : layer["agents"])
                for (const auto &row : agent["weights"]) {
                    double total = 0;
                    for (const auto &v : row) total += v.get<double>();
                    CHECK(std::abs(total - 1.0) < 1e-6);
                }
        CHECK(fs::exists(dir / "attention_layer0.svg"));
        CHECK(read_json(dir / "manifest.json")["command"] == "dump-attention");
        CHECK(run_cli({"dump-attention", "--checkpoint", (p.ablated / "best.ckpt").string(), "--data", p.data.string(),
                   "--scene", std::to_string(scene->scene_id), "--out", (dir / "x").string()})
                  .status == 1);
    }
}
