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

#include "maiformer/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "maiformer/model/weights.hpp"
#include "maiformer/training/loss.hpp"

namespace maiformer::training {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const EpochRecord &r) {
    return {{"epoch", r.epoch},   {"train_loss", r.train_loss}, {"val_loss", r.val_loss},
            {"lr", r.learning_rate}, {"wall_s", r.wall_seconds}, {"steps", r.steps},
            {"improved", r.improved}};
}

EpochRecord epoch_record_from_json(const json &j) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.train_loss = j.at("train_loss").get<double>();
    r.val_loss = j.at("val_loss").get<double>();
    r.learning_rate = j.at("lr").get<double>();
    r.wall_seconds = j.at("wall_s").get<double>();
    r.steps = j.at("steps").get<std::size_t>();
    r.improved = j.at("improved").get<bool>();
    return r;
}

void write_train_log(const fs::path &path, const TrainLog &log) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        for (const auto &r : log.epochs) out << to_json(r).dump() << '\n';
        json summary{{"epochs_run", log.epochs.size()},
                     {"best_epoch", log.best_epoch},
                     {"best_val_loss", log.best_val_loss},
                     {"stop_reason", log.stop_reason}};
        out << json{{"summary", summary}}.dump() << '\n';
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

TrainLog read_train_log(const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    TrainLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            if (j.contains("summary")) {
                const auto &s = j.at("summary");
                log.best_epoch = s.at("best_epoch").get<std::size_t>();
                log.best_val_loss = s.at("best_val_loss").get<double>();
                log.stop_reason = s.at("stop_reason").get<std::string>();
            } else {
                log.epochs.push_back(epoch_record_from_json(j));
            }
        } catch (const json::exception &e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

bool same_trajectory(const TrainLog &a, const TrainLog &b) {
    if (a.epochs.size() != b.epochs.size() || a.best_epoch != b.best_epoch || a.best_val_loss != b.best_val_loss ||
        a.stop_reason != b.stop_reason) {
        return false;
    }
    for (std::size_t i = 0; i < a.epochs.size(); ++i) {
        const auto &x = a.epochs[i];
        const auto &y = b.epochs[i];
        if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.val_loss != y.val_loss ||
            x.learning_rate != y.learning_rate || x.steps != y.steps || x.improved != y.improved) {
            return false;
        }
    }
    return true;
}

template <typename T>
double train_step(const model::ModelConfig &config, model::Weights<T> &weights, num::AdamState<T> &optimizer,
                  const data::Batch<T> &batch) {
    weights.zero_grad();
    double value = 0.0;
    try {
        auto pred = model::forward(config, weights, num::Var<T>(batch.past), batch.valid);
        auto loss = mse_loss(pred.output, batch.future, batch.valid);
        value = static_cast<double>(loss.value()[0]);
        if (!std::isfinite(value)) throw num::NumericError("non-finite loss " + std::to_string(value));
        num::backward(loss);
        num::adam_step(weights, optimizer);
    } catch (const num::NumericError &e) {
        throw TrainingAborted(0, 0, e.what());
    }
    return value;
}

namespace {

template <typename T>
data::Batch<T> make_batch(const std::vector<data::Scene> &scenes, const std::vector<std::size_t> &order,
                          std::size_t first, std::size_t count) {
    std::vector<const data::Scene *> ptrs;
    ptrs.reserve(count);
    for (std::size_t i = first; i < first + count; ++i) ptrs.push_back(&scenes[order[i]]);
    return data::pad_batch<T>(ptrs, 0);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

template <typename T>
model::Checkpoint<T> snapshot(const model::ModelConfig &config, const model::Weights<T> &weights,
                              const num::AdamState<T> &optimizer, const TrainOptions &options, json meta) {
    model::Checkpoint<T> ck;
    ck.config = config;
    ck.norm_stats = options.norm_stats;
    ck.weights = weights.clone();
    ck.optimizer = optimizer;
    ck.meta = std::move(meta);
    return ck;
}

void check_scenes(const std::vector<data::Scene> &scenes, const model::ModelConfig &config, const char *split) {
    if (scenes.empty()) throw std::invalid_argument(std::string("train: empty ") + split + " split");
    for (const auto &s : scenes) {
        if (s.agent_count() == 0 || s.agent_count() > config.max_agents) {
            throw std::invalid_argument(std::string("train: ") + split + " scene " + std::to_string(s.scene_id) +
                                        " has " + std::to_string(s.agent_count()) + " agents, limit " +
                                        std::to_string(config.max_agents));
        }
    }
}

} // namespace

template <typename T>
double evaluate_loss(const model::ModelConfig &config, const model::Weights<T> &weights,
                     const std::vector<data::Scene> &scenes, std::size_t batch_size) {
    if (scenes.empty()) throw std::invalid_argument("evaluate_loss: no scenes");
    num::NoGradGuard no_grad;
    std::vector<std::size_t> order(scenes.size());
    std::iota(order.begin(), order.end(), 0);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t first = 0; first < scenes.size(); first += batch_size, ++batches) {
        const auto batch = make_batch<T>(scenes, order, first, std::min(batch_size, scenes.size() - first));
        auto pred = model::forward(config, weights, num::Var<T>(batch.past), batch.valid);
        total += static_cast<double>(mse_loss(pred.output, batch.future, batch.valid).value()[0]);
    }
    return total / static_cast<double>(batches);
}

template <typename T>
TrainResult<T> train(const std::vector<data::Scene> &train_scenes, const std::vector<data::Scene> &val_scenes,
                     const model::ModelConfig &config, const TrainConfig &tc, const TrainOptions &options) {
    config.validate();
    tc.validate();
    check_scenes(train_scenes, config, "train");
    check_scenes(val_scenes, config, "validation");
    const bool persist = !options.out_dir.empty();
    if (persist) fs::create_directories(options.out_dir);
    const fs::path last_path = options.out_dir / "last.ckpt";
    const fs::path best_path = options.out_dir / "best.ckpt";
    const fs::path log_path = options.out_dir / "train_log.jsonl";

    TrainResult<T> result;
    model::Weights<T> weights;
    num::AdamState<T> optimizer;
    EarlyStopping stopper(tc.patience);
    std::size_t start = 0;

    if (options.resume) {
        if (!persist) throw std::invalid_argument("train: resume needs an output directory");
        auto last = model::load_checkpoint<T>(last_path);
        if (!(last.config == config)) throw std::invalid_argument("train: resume with a different model config");
        if (!last.optimizer) throw std::invalid_argument("train: " + last_path.string() + " has no optimizer state");
        if (train_config_from_json(last.meta.at("train_config")) != tc) {
            throw std::invalid_argument("train: resume with a different train config");
        }
        weights = last.weights.clone();
        optimizer = *last.optimizer;
        stopper = EarlyStopping::from_state(last.meta.at("early_stopping"));
        start = last.meta.at("epoch").template get<std::size_t>() + 1;
        result.log = read_train_log(log_path);
        if (result.log.epochs.size() < start) {
            throw std::runtime_error("train: " + log_path.string() + " is shorter than the checkpoint");
        }
        result.log.epochs.resize(start);
        result.best = model::load_checkpoint<T>(best_path);
        result.last = std::move(last);
    } else {
        weights = model::init_weights<T>(config, tc.seed);
        optimizer = num::AdamState<T>::for_parameters(weights, lr_at(0, tc));
    }

    std::size_t steps = optimizer.step;
    std::string reason = "epoch_limit";
    for (std::size_t epoch = start; epoch < tc.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        optimizer.learning_rate = lr_at(epoch, tc);
        const auto order = epoch_order(train_scenes.size(), tc.seed, epoch);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        bool step_cap = false;
        for (std::size_t first = 0; first < order.size(); first += tc.batch_size, ++batches) {
            const auto batch =
                make_batch<T>(train_scenes, order, first, std::min(tc.batch_size, order.size() - first));
            try {
                loss_sum += train_step(config, weights, optimizer, batch);
            } catch (const TrainingAborted &e) {
                throw TrainingAborted(epoch, batches,
                                      "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches) +
                                          " (first scene " + std::to_string(batch.scene_ids.front()) +
                                          "): " + e.what());
            }
            ++steps;
            if (options.max_steps > 0 && steps >= options.max_steps) {
                step_cap = true;
                ++batches;
                break;
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        rec.val_loss = evaluate_loss(config, weights, val_scenes, tc.batch_size);
        rec.learning_rate = optimizer.learning_rate;
        rec.steps = steps;
        rec.improved = stopper.observe(epoch, rec.val_loss);

        const json meta{{"epoch", epoch},
                        {"steps", steps},
                        {"best_epoch", stopper.best_epoch()},
                        {"best_val_loss", stopper.best_loss()},
                        {"train_config", to_json(tc)},
                        {"early_stopping", stopper.state()}};
        result.last = snapshot(config, weights, optimizer, options, meta);
        if (rec.improved) result.best = snapshot(config, weights, optimizer, options, meta);
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.epochs.push_back(rec);
        result.log.best_epoch = stopper.best_epoch();
        result.log.best_val_loss = stopper.best_loss();

        bool stop = false;
        if (stopper.should_stop()) {
            reason = "early_stopping";
            stop = true;
        } else if (step_cap) {
            reason = "step_limit";
            stop = true;
        } else if (options.stop_after_epochs > 0 && result.log.epochs.size() >= options.stop_after_epochs &&
                   epoch + 1 < tc.epochs) {
            reason = "interrupted";
            stop = true;
        }
        result.log.stop_reason = stop ? reason : "epoch_limit";
        if (persist) {
            if (rec.improved) model::save_checkpoint(best_path, result.best);
            model::save_checkpoint(last_path, result.last);
            write_train_log(log_path, result.log);
        }
        if (options.on_epoch) options.on_epoch(rec);
        if (stop) break;
    }
    if (result.log.epochs.empty()) throw std::runtime_error("train: no epochs to run");
    return result;
}

#define MAIFORMER_INSTANTIATE(T)                                                                                     \
    template double train_step(const model::ModelConfig &, model::Weights<T> &, num::AdamState<T> &,               \
                               const data::Batch<T> &);                                                            \
    template double evaluate_loss(const model::ModelConfig &, const model::Weights<T> &,                          \
                                  const std::vector<data::Scene> &, std::size_t);                                  \
    template TrainResult<T> train(const std::vector<data::Scene> &, const std::vector<data::Scene> &,              \
                                  const model::ModelConfig &, const TrainConfig &, const TrainOptions &);

MAIFORMER_INSTANTIATE(float)
MAIFORMER_INSTANTIATE(double)

#undef MAIFORMER_INSTANTIATE

} // namespace maiformer::training
