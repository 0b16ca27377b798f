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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maiformer/model/attention_record.hpp"

namespace maiformer::eval {

struct AgentScore {
    std::size_t agent = 0;
    std::string flight_id;
    double score = 0.0; // raw attention weight; a view's scores sum to 1
    double heat = 0.0;  // min-max scaled to [0, 1] across the scene's agents
    std::array<double, 3> position{}; // lat, lon, alt at the last observed step
};

struct AttentionView {
    std::size_t layer = 0;
    std::optional<std::size_t> head; // unset: mean over heads
    std::vector<AgentScore> scores;  // real agents only
};

struct AttentionReport {
    std::uint64_t scene_id = 0;
    std::size_t query_agent = 0;
    std::string query_id;
    std::vector<AttentionView> views; // per layer: each head, then the head mean
};

/// Min-max scaling of the scores to [0, 1]; all-equal scores map to 1.
std::vector<double> heat_scale(const std::vector<double> &scores);

/// Agent-attention scores of one query agent in scene `scene` of the
/// record. `positions` holds one entry per real agent. Throws
/// std::invalid_argument for a padded or out-of-range query agent or a model
/// without agent attention.
AttentionReport attention_report(const model::AttentionRecord &record, std::size_t scene, std::size_t query_agent,
                                 const std::vector<std::array<double, 3>> &positions);

nlohmann::json to_json(const AttentionReport &report);

/// Standalone SVG: agents placed by lon/lat, filled from blue (low) to red
/// (high) by heat, query agent ringed.
std::string attention_svg(const AttentionReport &report, const AttentionView &view);

} // namespace maiformer::eval
