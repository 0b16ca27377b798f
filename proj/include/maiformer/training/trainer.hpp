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

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "maiformer/data/batch.hpp"
#include "maiformer/data/normalizer.hpp"
#include "maiformer/model/checkpoint.hpp"
#include "maiformer/model/maiformer.hpp"
#include "maiformer/training/schedule.hpp"

namespace maiformer::training {

struct EpochRecord {
    std::size_t epoch = 0; // counted from 0, like lr_at
    double train_loss = 0.0;
    double val_loss = 0.0;
    double learning_rate = 0.0;
    double wall_seconds = 0.0;
    std::size_t steps = 0; // optimizer steps taken so far
    bool improved = false;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    std::string stop_reason; // early_stopping, epoch_limit, step_limit or interrupted
};

nlohmann::json to_json(const EpochRecord &r);
EpochRecord epoch_record_from_json(const nlohmann::json &j);

/// One JSON object per epoch, then {"summary": {...}}.
void write_train_log(const std::filesystem::path &path, const TrainLog &log);
TrainLog read_train_log(const std::filesystem::path &path);

/// Equality of everything except wall-clock time, compared bit for bit.
bool same_trajectory(const TrainLog &a, const TrainLog &b);

/// Non-finite loss or gradient. Carries where it happened.
class TrainingAborted : public std::runtime_error {
public:
    TrainingAborted(std::size_t epoch, std::size_t batch, const std::string &what)
        : std::runtime_error(what), epoch_(epoch), batch_(batch) {}
    std::size_t epoch() const { return epoch_; }
    std::size_t batch() const { return batch_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

struct TrainOptions {
    std::filesystem::path out_dir; // empty keeps everything in memory
    bool resume = false;           // continue from out_dir/last.ckpt
    std::size_t stop_after_epochs = 0; // > 0 ends the run early, as if interrupted
    std::size_t max_steps = 0;         // > 0 caps optimizer steps
    std::optional<data::NormStats> norm_stats; // stored in checkpoints
    std::function<void(const EpochRecord &)> on_epoch;
};

template <typename T>
struct TrainResult {
    model::Checkpoint<T> best; // weights with the lowest validation loss
    model::Checkpoint<T> last;
    TrainLog log;
};

/// Forward, loss, backward and one Adam step on a padded batch. Returns the
/// loss before the update. Throws TrainingAborted (batch id 0) on NaN.
template <typename T>
double train_step(const model::ModelConfig &config, model::Weights<T> &weights, num::AdamState<T> &optimizer,
                  const data::Batch<T> &batch);

/// Mean of per-batch losses over `scenes` in order, no graph built.
template <typename T>
double evaluate_loss(const model::ModelConfig &config, const model::Weights<T> &weights,
                     const std::vector<data::Scene> &scenes, std::size_t batch_size);

/// Scenes must already be normalized. Writes last.ckpt, best.ckpt and
/// train_log.jsonl into out_dir when one is given.
template <typename T>
TrainResult<T> train(const std::vector<data::Scene> &train_scenes, const std::vector<data::Scene> &val_scenes,
                     const model::ModelConfig &model_config, const TrainConfig &train_config,
                     const TrainOptions &options = {});

} // namespace maiformer::training
