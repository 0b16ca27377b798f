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
#include <vector>

#include "maiformer/data/scene.hpp"

namespace maiformer::data {

/// Scenes stacked and zero-padded to a common agent count.
template <typename T>
struct Batch {
    std::size_t size = 0;       // B
    std::size_t max_agents = 0; // N after padding
    num::Array<T> past;         // [B, N, T, 3]
    num::Array<T> future;       // [B, N, S, 3]
    std::vector<std::uint8_t> valid; // [B * N], 1 for real agents
    std::vector<std::size_t> agent_counts;
    std::vector<std::uint64_t> scene_ids;
};

/// Throws DataError if a scene has more than `n_max` agents or the blocks
/// disagree in length. Pass n_max = 0 to pad to the largest scene.
template <typename T>
Batch<T> pad_batch(const std::vector<const Scene *> &scenes, std::size_t n_max);

template <typename T>
Batch<T> pad_batch(const std::vector<Scene> &scenes, std::size_t n_max);

} // namespace maiformer::data
