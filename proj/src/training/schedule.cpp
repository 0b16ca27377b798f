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

#include "maiformer/training/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace maiformer::training {

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || decay_every == 0 || patience == 0) {
        throw std::invalid_argument("train config: epochs, batch_size, decay_every and patience must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("train config: learning_rate must be positive");
    }
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
        throw std::invalid_argument("train config: decay_factor must lie in (0, 1]");
    }
    if (patience > epochs) throw std::invalid_argument("train config: patience exceeds epochs");
}

nlohmann::json to_json(const TrainConfig &c) {
    return {{"epochs", c.epochs},           {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate},
            {"decay_factor", c.decay_factor}, {"decay_every", c.decay_every}, {"patience", c.patience},
            {"seed", c.seed},               {"precision", model::to_string(c.precision)}};
}

TrainConfig train_config_from_json(const nlohmann::json &j, TrainConfig c) {
    if (!j.is_object()) throw std::invalid_argument("train config: expected a JSON object");
    for (const auto &[key, value] : j.items()) {
        if (key == "epochs") c.epochs = value.get<std::size_t>();
        else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "decay_factor") c.decay_factor = value.get<double>();
        else if (key == "decay_every") c.decay_every = value.get<std::size_t>();
        else if (key == "patience") c.patience = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "precision") c.precision = model::precision_from_string(value.get<std::string>());
        else throw std::invalid_argument("train config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

double lr_at(std::size_t epoch, const TrainConfig &config) {
    return config.learning_rate * std::pow(config.decay_factor, static_cast<double>(epoch / config.decay_every));
}

bool EarlyStopping::observe(std::size_t epoch, double loss) {
    if (loss < best_loss_) {
        best_loss_ = loss;
        best_epoch_ = epoch;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return false;
}

nlohmann::json EarlyStopping::state() const {
    nlohmann::json j{{"patience", patience_}, {"best_epoch", best_epoch_}, {"since_best", since_best_}};
    // JSON has no infinity; null stands for "nothing observed yet".
    j["best_loss"] = std::isfinite(best_loss_) ? nlohmann::json(best_loss_) : nlohmann::json(nullptr);
    return j;
}

EarlyStopping EarlyStopping::from_state(const nlohmann::json &j) {
    EarlyStopping s(j.at("patience").get<std::size_t>());
    s.best_epoch_ = j.at("best_epoch").get<std::size_t>();
    s.since_best_ = j.at("since_best").get<std::size_t>();
    if (!j.at("best_loss").is_null()) s.best_loss_ = j.at("best_loss").get<double>();
    return s;
}

} // namespace maiformer::training
