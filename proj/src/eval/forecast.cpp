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

#include "maiformer/eval/forecast.hpp"

#include <algorithm>

#include "maiformer/data/batch.hpp"

namespace maiformer::eval {

template <typename T>
std::vector<Forecast> forecast_scenes(const model::ModelConfig &config, const model::Weights<T> &weights,
                                      const std::vector<data::Scene> &scenes, const data::NormStats &stats,
                                      std::size_t batch_size) {
    if (batch_size == 0) throw std::invalid_argument("forecast_scenes: batch size must be positive");
    num::NoGradGuard no_grad;
    std::vector<Forecast> out;
    out.reserve(scenes.size());
    const std::size_t S = config.future_steps, F = data::kVariates;
    for (std::size_t first = 0; first < scenes.size(); first += batch_size) {
        const std::size_t count = std::min(batch_size, scenes.size() - first);
        std::vector<data::Scene> normalized;
        normalized.reserve(count);
        for (std::size_t i = first; i < first + count; ++i) normalized.push_back(data::normalize(scenes[i], stats));
        const auto batch = data::pad_batch<T>(normalized, 0);
        const auto pred = model::forward(config, weights, num::Var<T>(batch.past), batch.valid).output.value();
        const std::size_t N = batch.max_agents;
        for (std::size_t b = 0; b < count; ++b) {
            const data::Scene &scene = scenes[first + b];
            Forecast f;
            f.scene_id = scene.scene_id;
            const std::size_t n = scene.agent_count();
            f.prediction = num::Array<double>(num::Shape{n, S, F});
            f.target = num::Array<double>(num::Shape{n, S, F});
            for (std::size_t i = 0; i < n; ++i) {
                f.agent_ids.push_back(scene.agents[i].flight_id);
                for (std::size_t s = 0; s < S; ++s) {
                    for (std::size_t v = 0; v < F; ++v) {
                        const double y = static_cast<double>(pred[((b * N + i) * S + s) * F + v]);
                        f.prediction(i, s, v) = stats.denormalize(v, y);
                        f.target(i, s, v) = scene.agents[i].future(s, v);
                    }
                }
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

template <typename T>
model::AttentionRecord record_scene_attention(const model::ModelConfig &config, const model::Weights<T> &weights,
                                              const data::Scene &scene, const data::NormStats &stats) {
    num::NoGradGuard no_grad;
    const auto batch = data::pad_batch<T>(std::vector<data::Scene>{data::normalize(scene, stats)}, 0);
    auto rec = model::forward(config, weights, num::Var<T>(batch.past), batch.valid, true).record;
    rec.scene_ids = {scene.scene_id};
    rec.agent_ids.clear();
    for (const auto &a : scene.agents) rec.agent_ids.push_back(a.flight_id);
    return rec;
}

template std::vector<Forecast> forecast_scenes(const model::ModelConfig &, const model::Weights<float> &,
                                               const std::vector<data::Scene> &, const data::NormStats &,
                                               std::size_t);
template std::vector<Forecast> forecast_scenes(const model::ModelConfig &, const model::Weights<double> &,
                                               const std::vector<data::Scene> &, const data::NormStats &,
                                               std::size_t);
template model::AttentionRecord record_scene_attention(const model::ModelConfig &, const model::Weights<float> &,
                                                       const data::Scene &, const data::NormStats &);
template model::AttentionRecord record_scene_attention(const model::ModelConfig &, const model::Weights<double> &,
                                                       const data::Scene &, const data::NormStats &);

} // namespace maiformer::eval
