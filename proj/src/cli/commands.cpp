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


#include "maiformer/cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "maiformer/data/dataset_io.hpp"
#include "maiformer/data/pipeline.hpp"
#include "maiformer/data/synthetic.hpp"
#include "maiformer/eval/attention_report.hpp"
#include "maiformer/eval/forecast.hpp"
#include "maiformer/eval/report_io.hpp"
#include "maiformer/model/checkpoint.hpp"
#include "maiformer/numerics/kernels.hpp"
#include "maiformer/training/trainer.hpp"
#include "maiformer/version.hpp"

namespace maiformer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kTracksFile = "tracks.csv";
constexpr const char *kStatsFile = "norm_stats.txt";
constexpr const char *kManifestFile = "manifest.json";
const char *const kSplitNames[] = {"train", "val", "test"};

// Flags shared by several commands. Unset optionals leave file values alone.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 1;
    std::optional<std::string> precision;
    std::string ablation = "none";
    std::string horizons;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Config file: a JSON object with optional "synthetic", "scenes", "model"
// and "train" sections.
json load_config(const std::string &path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config " + path + ": expected a JSON object");
    for (const auto &[key, value] : j.items()) {
        if (key != "synthetic" && key != "scenes" && key != "model" && key != "train") {
            throw std::runtime_error("config " + path + ": unknown section '" + key + "'");
        }
    }
    return j;
}

json section(const json &config, const char *name) { return config.contains(name) ? config.at(name) : json::object(); }

json to_json(const data::SceneOptions &o) {
    return {{"past_steps", o.past_steps},
            {"future_steps", o.future_steps},
            {"stride", o.stride},
            {"max_agents", o.max_agents},
            {"keep_single_agent", o.keep_single_agent}};
}

data::SceneOptions scene_options_from_json(const json &j, data::SceneOptions o) {
    for (const auto &[key, value] : j.items()) {
        if (key == "past_steps") o.past_steps = value.get<std::size_t>();
        else if (key == "future_steps") o.future_steps = value.get<std::size_t>();
        else if (key == "stride") o.stride = value.get<std::size_t>();
        else if (key == "max_agents") o.max_agents = value.get<std::size_t>();
        else if (key == "keep_single_agent") o.keep_single_agent = value.get<bool>();
        else throw std::runtime_error("scenes config: unknown key '" + key + "'");
    }
    return o;
}

std::vector<std::size_t> parse_horizons(const std::string &text) {
    if (text.empty()) return eval::kDefaultHorizons;
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception &) {
            pos = 0;
        }
        if (pos != item.size() || v == 0) throw std::runtime_error("--horizons: bad step '" + item + "'");
        out.push_back(v);
    }
    return out;
}

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string> &args) {
        doc_["command"] = std::move(command);
        doc_["tool_version"] = kVersion;
        doc_["argv"] = args;
        doc_["started_utc"] = utc_now();
    }
    json &operator[](const char *key) { return doc_[key]; }
    void write(const fs::path &dir) {
        doc_["finished_utc"] = utc_now();
        write_text(dir / kManifestFile, doc_.dump(2) + "\n");
    }

private:
    json doc_ = json::object();
};

fs::path require_out(const Common &c) {
    if (c.out.empty()) throw std::runtime_error("--out is required");
    fs::create_directories(c.out);
    return c.out;
}

// ---- dataset directory ------------------------------------------------------

struct DatasetDir {
    fs::path dir;
    data::NormStats stats;
    data::SceneFileHeader header;
};

DatasetDir open_dataset(const std::string &dir) {
    DatasetDir d;
    d.dir = dir;
    if (!fs::is_directory(d.dir)) throw std::runtime_error("dataset directory not found: " + dir);
    d.stats = data::load_norm_stats(d.dir / kStatsFile);
    return d;
}

std::vector<data::Scene> read_split(DatasetDir &d, const std::string &split) {
    if (split != "train" && split != "val" && split != "test") {
        throw std::runtime_error("unknown split '" + split + "' (train, val or test)");
    }
    return data::read_scenes(d.dir / (split + ".jsonl"), &d.header);
}

// ---- checkpoints --------------------------------------------------------------

void check_stats(const std::optional<data::NormStats> &ckpt_stats, const DatasetDir &d, const std::string &path) {
    if (!ckpt_stats) throw std::runtime_error(path + ": checkpoint carries no normalization statistics");
    const auto a = data::norm_stats_hash(*ckpt_stats), b = data::norm_stats_hash(d.stats);
    if (a != b) {
        throw std::runtime_error(path + ": normalization statistics " + a + " do not match dataset " +
                                 d.dir.string() + " (" + b + ")");
    }
}

template <typename F>
auto with_checkpoint(const std::string &path, F &&fn) {
    const auto info = model::inspect_checkpoint(path);
    if (info.element_bytes == 4) return fn(model::load_checkpoint<float>(path));
    return fn(model::load_checkpoint<double>(path));
}

json prediction_record(const eval::Forecast &f, double t0) {
    json agents = json::array();
    const std::size_t S = f.prediction.extent(1);
    for (std::size_t i = 0; i < f.prediction.extent(0); ++i) {
        json steps = json::array();
        for (std::size_t s = 0; s < S; ++s) {
            steps.push_back({f.prediction(i, s, 0), f.prediction(i, s, 1), f.prediction(i, s, 2)});
        }
        agents.push_back({{"flight_id", f.agent_ids[i]}, {"prediction", steps}});
    }
    return {{"scene_id", f.scene_id}, {"t0", t0}, {"agents", agents}};
}

void write_predictions(const fs::path &path, const std::vector<eval::Forecast> &fs_,
                       const std::vector<data::Scene> &scenes) {
    std::string text;
    for (std::size_t i = 0; i < fs_.size(); ++i) text += prediction_record(fs_[i], scenes[i].t0).dump() + "\n";
    write_text(path, text);
}

std::vector<data::Scene> select_scenes(const std::vector<data::Scene> &all, const std::vector<std::uint64_t> &ids,
                                       const std::string &where) {
    if (ids.empty()) return all;
    std::map<std::uint64_t, const data::Scene *> index;
    for (const auto &s : all) index[s.scene_id] = &s;
    std::vector<data::Scene> out;
    for (auto id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw std::runtime_error("scene " + std::to_string(id) + " not found in " + where);
        out.push_back(*it->second);
    }
    return out;
}

// ---- commands -----------------------------------------------------------------

int cmd_synth(const Common &c, std::optional<std::size_t> scenes, const std::vector<std::string> &args,
              std::ostream &out) {
    const json config = load_config(c.config);
    auto sc = data::synthetic_config_from_json(section(config, "synthetic"));
    if (c.seed) sc.seed = *c.seed;
    if (scenes) sc.num_scenes = *scenes;
    sc.validate();
    const fs::path dir = require_out(c);
    Manifest m("synth", args);
    const auto tracks = data::generate_synthetic_traffic(sc);
    data::write_tracks_csv(dir / kTracksFile, tracks);
    std::size_t points = 0;
    for (const auto &t : tracks) points += t.points.size();
    m["config"] = {{"synthetic", data::to_json(sc)}};
    m["seed"] = sc.seed;
    m["outputs"] = {kTracksFile};
    m["tracks"] = tracks.size();
    m["points"] = points;
    m.write(dir);
    out << "wrote " << tracks.size() << " tracks (" << points << " reports) to " << (dir / kTracksFile).string()
        << "\n";
    return 0;
}

int cmd_prepare(const Common &c, const std::string &tracks_path, std::optional<std::size_t> past,
                std::optional<std::size_t> future, std::optional<std::size_t> max_agents,
                const std::vector<std::string> &args, std::ostream &out) {
    const json config = load_config(c.config);
    auto so = scene_options_from_json(section(config, "scenes"), {});
    if (past) so.past_steps = *past;
    if (future) so.future_steps = *future;
    if (max_agents) so.max_agents = *max_agents;
    fs::path input = tracks_path;
    if (fs::is_directory(input)) input /= kTracksFile;
    const auto tracks = data::read_tracks_csv(input);
    const fs::path dir = require_out(c);
    Manifest m("prepare", args);
    auto prepared = data::prepare_dataset(tracks, so);

    data::SceneFileHeader header;
    header.past_steps = so.past_steps;
    header.future_steps = so.future_steps;
    const std::vector<data::Scene> *splits[] = {&prepared.split.train, &prepared.split.val, &prepared.split.test};
    json counts = json::object();
    for (std::size_t k = 0; k < 3; ++k) {
        header.count = splits[k]->size();
        data::write_scenes(dir / (std::string(kSplitNames[k]) + ".jsonl"), *splits[k], header);
        counts[kSplitNames[k]] = splits[k]->size();
    }
    data::save_norm_stats(dir / kStatsFile, prepared.stats);

    m["config"] = {{"scenes", to_json(so)}};
    m["inputs"] = {input.string()};
    m["outputs"] = {"train.jsonl", "val.jsonl", "test.jsonl", kStatsFile};
    m["counts"] = counts;
    m["norm_stats_hash"] = data::norm_stats_hash(prepared.stats);
    m["tracks_used"] = prepared.tracks_used;
    m["tracks_skipped"] = prepared.tracks_skipped;
    m["windows_scanned"] = prepared.build.windows_scanned;
    m["dropped_over_capacity"] = prepared.build.dropped_over_capacity;
    m["dropped_single_agent"] = prepared.build.dropped_single_agent;
    m.write(dir);
    out << "scenes: train " << counts["train"] << ", val " << counts["val"] << ", test " << counts["test"] << "\n";
    return 0;
}

template <typename T>
training::TrainLog run_training(const std::vector<data::Scene> &train, const std::vector<data::Scene> &val,
                                const model::ModelConfig &mc, const training::TrainConfig &tc,
                                const training::TrainOptions &opt) {
    return training::train<T>(train, val, mc, tc, opt).log;
}

int cmd_train(const Common &c, const std::string &data_dir, std::optional<std::size_t> epochs, bool resume,
              const std::vector<std::string> &args, std::ostream &out) {
    const json config = load_config(c.config);
    auto d = open_dataset(data_dir);
    const auto train_raw = read_split(d, "train");
    const auto val_raw = read_split(d, "val");

    const json model_section = section(config, "model");
    auto mc = model::model_config_from_json(model_section);
    for (const char *key : {"past_steps", "future_steps"}) {
        const std::size_t have = std::string(key) == "past_steps" ? d.header.past_steps : d.header.future_steps;
        if (model_section.contains(key) && model_section.at(key).get<std::size_t>() != have) {
            throw std::runtime_error(std::string("model config ") + key + " disagrees with dataset " + data_dir);
        }
    }
    mc.past_steps = d.header.past_steps;
    mc.future_steps = d.header.future_steps;
    if (c.ablation == "mma-only") mc = model::mma_only(mc);
    else if (c.ablation != "none") throw std::runtime_error("--ablation must be none or mma-only");

    auto tc = training::train_config_from_json(section(config, "train"));
    if (c.seed) tc.seed = *c.seed;
    if (epochs) tc.epochs = *epochs;
    if (c.precision) tc.precision = model::precision_from_string(*c.precision);
    tc.patience = std::min(tc.patience, tc.epochs);
    mc.precision = tc.precision;
    mc.validate();
    tc.validate();

    const fs::path dir = require_out(c);
    Manifest m("train", args);
    m["config"] = {{"model", model::to_json(mc)}, {"train", training::to_json(tc)}, {"threads", c.threads}};
    m["seed"] = tc.seed;
    m["inputs"] = {data_dir};
    m["norm_stats_hash"] = data::norm_stats_hash(d.stats);

    training::TrainOptions opt;
    opt.out_dir = dir;
    opt.resume = resume;
    opt.norm_stats = d.stats;
    opt.on_epoch = [&out](const training::EpochRecord &r) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "epoch %zu  train %.6e  val %.6e  lr %.1e  %.1fs%s\n", r.epoch, r.train_loss,
                      r.val_loss, r.learning_rate, r.wall_seconds, r.improved ? "  *" : "");
        out << buf << std::flush;
    };
    const auto train = data::normalize_all(train_raw, d.stats);
    const auto val = data::normalize_all(val_raw, d.stats);
    const auto log = tc.precision == model::Precision::f32 ? run_training<float>(train, val, mc, tc, opt)
                                                           : run_training<double>(train, val, mc, tc, opt);
    m["outputs"] = {"best.ckpt", "last.ckpt", "train_log.jsonl"};
    m["epochs_run"] = log.epochs.size();
    m["best_epoch"] = log.best_epoch;
    m["best_val_loss"] = log.best_val_loss;
    m["stop_reason"] = log.stop_reason;
    m["stop_epoch"] = log.epochs.back().epoch;
    m.write(dir);
    out << "best epoch " << log.best_epoch << " (val " << log.best_val_loss << "), stopped: " << log.stop_reason
        << "\n";
    return 0;
}

int cmd_evaluate(const Common &c, const std::vector<std::string> &checkpoints, std::vector<std::string> names,
                 const std::string &data_dir, const std::string &split, bool pooled, bool save_predictions,
                 const std::vector<std::string> &args, std::ostream &out) {
    if (checkpoints.empty()) throw std::runtime_error("--checkpoint is required");
    if (!names.empty() && names.size() != checkpoints.size()) {
        throw std::runtime_error("--name must be given once per --checkpoint");
    }
    auto d = open_dataset(data_dir);
    const auto scenes = read_split(d, split);
    if (scenes.empty()) throw std::runtime_error("split '" + split + "' of " + data_dir + " is empty");
    const auto horizons = parse_horizons(c.horizons);
    for (auto h : horizons) {
        if (h > d.header.future_steps) {
            throw std::runtime_error("--horizons: step " + std::to_string(h) + " beyond the dataset's " +
                                     std::to_string(d.header.future_steps) + " future steps");
        }
    }
    const fs::path dir = require_out(c);
    Manifest m("evaluate", args);
    eval::MetricOptions mo;
    mo.pooled = pooled;
    std::vector<eval::MetricsReport> reports;
    std::set<std::string> used;
    json models = json::array();
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        const auto &path = checkpoints[k];
        auto [forecasts, config] = with_checkpoint(path, [&](const auto &ck) {
            check_stats(ck.norm_stats, d, path);
            return std::make_pair(eval::forecast_scenes(ck.config, ck.weights, scenes, d.stats), ck.config);
        });
        const std::string base = names.empty() ? (config.agent_attention ? "maiformer" : "mma-only") : names[k];
        std::string name = base;
        for (std::size_t n = 2; used.contains(name); ++n) name = base + "#" + std::to_string(n);
        used.insert(name);
        reports.push_back(eval::compute_metrics(forecasts, horizons, mo, name));
        models.push_back({{"name", name}, {"checkpoint", path}, {"config", model::to_json(config)}});
        if (save_predictions) {
            const std::string file = checkpoints.size() == 1 ? "predictions.jsonl" : "predictions_" + std::to_string(k) + ".jsonl";
            write_predictions(dir / file, forecasts, scenes);
        }
    }
    eval::write_reports(dir, reports);
    m["config"] = {{"horizons", horizons}, {"split", split}, {"averaging", pooled ? "pooled" : "per_scene"}};
    m["inputs"] = {data_dir};
    m["models"] = models;
    m["norm_stats_hash"] = data::norm_stats_hash(d.stats);
    m["outputs"] = {"report.txt", "metrics.json"};
    m.write(dir);
    out << eval::format_report(reports);
    return 0;
}

int cmd_predict(const Common &c, const std::string &checkpoint, const std::string &data_dir, const std::string &split,
                const std::vector<std::uint64_t> &scene_ids, const std::vector<std::string> &args,
                std::ostream &out) {
    auto d = open_dataset(data_dir);
    const auto scenes = select_scenes(read_split(d, split), scene_ids, data_dir + "/" + split + ".jsonl");
    const fs::path dir = require_out(c);
    Manifest m("predict", args);
    const auto forecasts = with_checkpoint(checkpoint, [&](const auto &ck) {
        check_stats(ck.norm_stats, d, checkpoint);
        return eval::forecast_scenes(ck.config, ck.weights, scenes, d.stats);
    });
    write_predictions(dir / "predictions.jsonl", forecasts, scenes);
    m["config"] = {{"split", split}, {"scene_ids", scene_ids}};
    m["inputs"] = {checkpoint, data_dir};
    m["outputs"] = {"predictions.jsonl"};
    m["scenes"] = scenes.size();
    m.write(dir);
    out << "wrote predictions for " << scenes.size() << " scenes\n";
    return 0;
}

int cmd_dump_attention(const Common &c, const std::string &checkpoint, const std::string &data_dir,
                       const std::string &split, std::uint64_t scene_id, std::size_t query, bool svg,
                       const std::vector<std::string> &args, std::ostream &out) {
    auto d = open_dataset(data_dir);
    const auto scenes = select_scenes(read_split(d, split), {scene_id}, data_dir + "/" + split + ".jsonl");
    const auto &scene = scenes.front();
    if (query >= scene.agent_count()) {
        throw std::runtime_error("scene " + std::to_string(scene_id) + " has " + std::to_string(scene.agent_count()) +
                                 " agents; no query agent " + std::to_string(query));
    }
    const fs::path dir = require_out(c);
    Manifest m("dump-attention", args);
    std::vector<std::array<double, 3>> positions;
    for (const auto &a : scene.agents) {
        const std::size_t t = a.past.extent(0) - 1;
        positions.push_back({a.past(t, 0), a.past(t, 1), a.past(t, 2)});
    }
    const auto rec = with_checkpoint(checkpoint, [&](const auto &ck) {
        check_stats(ck.norm_stats, d, checkpoint);
        return eval::record_scene_attention(ck.config, ck.weights, scene, d.stats);
    });
    const auto report = eval::attention_report(rec, 0, query, positions);
    json doc = eval::to_json(report);
    // Head-mean variate blocks of every agent, one FxF matrix per layer.
    json mma = json::array();
    for (std::size_t l = 0; l < rec.layers(); ++l) {
        json per_agent = json::array();
        for (std::size_t i = 0; i < scene.agent_count(); ++i) {
            const auto block = model::mma_block(rec, l, std::nullopt, 0, i);
            json rows = json::array();
            for (std::size_t r = 0; r < block.extent(0); ++r) {
                json row = json::array();
                for (std::size_t k = 0; k < block.extent(1); ++k) row.push_back(block(r, k));
                rows.push_back(row);
            }
            per_agent.push_back({{"flight_id", scene.agents[i].flight_id}, {"weights", rows}});
        }
        mma.push_back({{"layer", l}, {"agents", per_agent}});
    }
    doc["variate_attention"] = mma;
    write_text(dir / "attention.json", doc.dump(2) + "\n");
    json outputs = {"attention.json"};
    if (svg) {
        for (const auto &view : report.views) {
            if (view.head) continue;
            const std::string file = "attention_layer" + std::to_string(view.layer) + ".svg";
            write_text(dir / file, eval::attention_svg(report, view));
            outputs.push_back(file);
        }
    }
    m["config"] = {{"split", split}, {"scene_id", scene_id}, {"query_agent", query}};
    m["inputs"] = {checkpoint, data_dir};
    m["outputs"] = outputs;
    m.write(dir);
    out << "query " << report.query_id << ", " << report.views.size() << " views written to " << dir.string() << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Multi-agent flight trajectory prediction", "maiformer"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App *sub, bool seed, bool precision) {
        sub->add_option("--config", common.config, "JSON config file (sections: synthetic, scenes, model, train)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "Output directory")->required();
        sub->add_option("--threads", common.threads, "OpenMP threads (1 is the reproducible mode)")
            ->check(CLI::PositiveNumber);
        if (seed) sub->add_option("--seed", common.seed, "Random seed");
        if (precision) {
            sub->add_option("--precision", common.precision, "Arithmetic precision")
                ->check(CLI::IsMember({"f32", "f64"}));
        }
    };

    auto *synth = app.add_subcommand("synth", "Generate synthetic arrival traffic");
    add_common(synth, true, false);
    std::optional<std::size_t> synth_scenes;
    synth->add_option("--scenes", synth_scenes, "Approximate number of scenes to fill");

    auto *prepare = app.add_subcommand("prepare", "Resample tracks, build scenes, split and fit normalization");
    add_common(prepare, false, false);
    std::string tracks_path;
    std::optional<std::size_t> past, future, max_agents;
    prepare->add_option("--tracks", tracks_path, "Track CSV, or a directory holding tracks.csv")->required();
    prepare->add_option("--past", past, "Past steps T");
    prepare->add_option("--future", future, "Future steps S");
    prepare->add_option("--max-agents", max_agents, "Drop scenes with more agents");

    auto *train = app.add_subcommand("train", "Train a model on a prepared dataset");
    add_common(train, true, true);
    std::string data_dir;
    std::optional<std::size_t> epochs;
    bool resume = false;
    train->add_option("--data", data_dir, "Prepared dataset directory")->required();
    train->add_option("--ablation", common.ablation, "Model variant")->check(CLI::IsMember({"none", "mma-only"}));
    train->add_option("--epochs", epochs, "Override the epoch limit");
    train->add_flag("--resume", resume, "Continue from <out>/last.ckpt");

    auto *evaluate = app.add_subcommand("evaluate", "Error metrics of one or more checkpoints");
    add_common(evaluate, false, false);
    std::vector<std::string> checkpoints, names;
    std::string split = "test";
    bool pooled = false, save_predictions = false;
    evaluate->add_option("--checkpoint", checkpoints, "Checkpoint file (repeat to compare models)")->required();
    evaluate->add_option("--name", names, "Display name per checkpoint");
    evaluate->add_option("--data", data_dir, "Prepared dataset directory")->required();
    evaluate->add_option("--split", split, "train, val or test");
    evaluate->add_option("--horizons", common.horizons, "Comma-separated 1-based steps (default 1,5,10,15,20)");
    evaluate->add_flag("--pooled", pooled, "Average over all elements instead of per scene");
    evaluate->add_flag("--save-predictions", save_predictions, "Also write the denormalized predictions");

    auto *predict = app.add_subcommand("predict", "Denormalized predictions for scenes of a dataset");
    add_common(predict, false, false);
    std::string checkpoint;
    std::vector<std::uint64_t> scene_ids;
    predict->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    predict->add_option("--data", data_dir, "Prepared dataset directory")->required();
    predict->add_option("--split", split, "train, val or test");
    predict->add_option("--scene", scene_ids, "Scene id (repeatable; default all)");

    auto *dump = app.add_subcommand("dump-attention", "Agent attention scores and heatmaps for one scene");
    add_common(dump, false, false);
    std::uint64_t scene_id = 0;
    std::size_t query = 0;
    bool no_svg = false;
    dump->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    dump->add_option("--data", data_dir, "Prepared dataset directory")->required();
    dump->add_option("--split", split, "train, val or test");
    dump->add_option("--scene", scene_id, "Scene id")->required();
    dump->add_option("--query", query, "Query agent index within the scene");
    dump->add_flag("--no-svg", no_svg, "Skip the heatmap files");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    std::vector<std::string> full{"maiformer"};
    full.insert(full.end(), args.begin(), args.end());
    try {
        num::kernels::set_threads(common.threads);
        if (*synth) return cmd_synth(common, synth_scenes, full, out);
        if (*prepare) return cmd_prepare(common, tracks_path, past, future, max_agents, full, out);
        if (*train) return cmd_train(common, data_dir, epochs, resume, full, out);
        if (*evaluate) {
            return cmd_evaluate(common, checkpoints, names, data_dir, split, pooled, save_predictions, full, out);
        }
        if (*predict) return cmd_predict(common, checkpoint, data_dir, split, scene_ids, full, out);
        if (*dump) return cmd_dump_attention(common, checkpoint, data_dir, split, scene_id, query, !no_svg, full, out);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace maiformer::cli
