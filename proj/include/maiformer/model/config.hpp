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

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace maiformer::model {

enum class Precision { f32, f64 };

std::string to_string(Precision p);
Precision precision_from_string(const std::string &s);

struct ModelConfig {
    std::size_t max_agents = 10;
    std::size_t past_steps = 20;   // T
    std::size_t future_steps = 20; // S
    std::size_t variates = 3;      // F
    std::size_t d_model = 256;     // D
    std::size_t layers = 3;        // L
    std::size_t heads = 4;         // H, shared by both attention modules
    std::size_t ffn_hidden = 1024;
    std::vector<std::size_t> decoder_widths{256, 128, 64, 32}; // hidden layers; a final layer maps to S
    bool agent_attention = true; // false: MMA-only ablation
    bool mma_residual = false;
    Precision precision = Precision::f32;

    std::size_t agent_width() const { return variates * d_model; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool operator==(const ModelConfig &) const = default;
};

/// The MMA-only ablation of `base`: agent attention removed.
ModelConfig mma_only(ModelConfig base);

nlohmann::json to_json(const ModelConfig &c);
/// Missing keys keep the values already in `base`.
ModelConfig model_config_from_json(const nlohmann::json &j, ModelConfig base = {});

} // namespace maiformer::model
