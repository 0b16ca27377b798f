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

#include <cstdint>
#include <limits>

#include "json.hpp"
#include "maiformer/model/config.hpp"

namespace maiformer::training {

struct TrainConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 256;
    double learning_rate = 1e-4;
    double decay_factor = 0.1;
    std::size_t decay_every = 50;
    std::size_t patience = 10;
    std::uint64_t seed = 0;
    model::Precision precision = model::Precision::f32;

    void validate() const; // throws std::invalid_argument
    bool operator==(const TrainConfig &) const = default;
};

nlohmann::json to_json(const TrainConfig &config);
/// Overlays the keys present in j onto base; unknown keys are an error.
TrainConfig train_config_from_json(const nlohmann::json &j, TrainConfig base = {});

/// Step decay: lr * decay_factor^floor(epoch / decay_every), epochs counted from 0.
double lr_at(std::size_t epoch, const TrainConfig &config);

/// Stops after `patience` consecutive epochs without a strict decrease of
/// the monitored loss.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    /// Returns true if this epoch is the new best.
    bool observe(std::size_t epoch, double loss);
    bool should_stop() const { return since_best_ >= patience_; }

    std::size_t best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_loss_; }
    std::size_t epochs_since_best() const { return since_best_; }

    nlohmann::json state() const;
    static EarlyStopping from_state(const nlohmann::json &j);

private:
    std::size_t patience_;
    std::size_t best_epoch_ = 0;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::size_t since_best_ = 0;
};

} // namespace maiformer::training
