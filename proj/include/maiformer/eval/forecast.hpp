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

#include <vector>

#include "maiformer/data/normalizer.hpp"
#include "maiformer/eval/metrics.hpp"
#include "maiformer/model/maiformer.hpp"

namespace maiformer::eval {

/// Runs the model over scenes given in physical units: normalizes the past
/// block with `stats`, predicts, and denormalizes. Targets are the scenes'
/// own future blocks, untouched. No graph is built.
template <typename T>
std::vector<Forecast> forecast_scenes(const model::ModelConfig &config, const model::Weights<T> &weights,
                                      const std::vector<data::Scene> &scenes, const data::NormStats &stats,
                                      std::size_t batch_size = 256);

/// Single-scene forward pass with attention captured; scene and agent ids
/// are filled in.
template <typename T>
model::AttentionRecord record_scene_attention(const model::ModelConfig &config, const model::Weights<T> &weights,
                                              const data::Scene &scene, const data::NormStats &stats);

} // namespace maiformer::eval
