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


#include "maiformer/data/batch.hpp"

#include <algorithm>

namespace maiformer::data {

template <typename T>
Batch<T> pad_batch(const std::vector<const Scene *> &scenes, std::size_t n_max) {
    if (scenes.empty()) throw DataError("pad_batch: no scenes");
    const Scene &first = *scenes.front();
    if (first.agents.empty()) throw DataError("pad_batch: scene " + std::to_string(first.scene_id) + " has no agents");
    const std::size_t past_len = first.agents.front().past.extent(0);
    const std::size_t future_len = first.agents.front().future.extent(0);
    std::size_t widest = 0;
    for (const Scene *s : scenes) widest = std::max(widest, s->agents.size());
    if (n_max == 0) n_max = widest;
    if (widest > n_max) {
        throw DataError("pad_batch: scene with " + std::to_string(widest) + " agents exceeds N_max=" +
                        std::to_string(n_max));
    }

    Batch<T> b;
    b.size = scenes.size();
    b.max_agents = n_max;
    b.past = num::Array<T>(num::Shape{b.size, n_max, past_len, kVariates});
    b.future = num::Array<T>(num::Shape{b.size, n_max, future_len, kVariates});
    b.valid.assign(b.size * n_max, 0);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const Scene &s = *scenes[i];
        if (s.agents.empty()) throw DataError("pad_batch: scene " + std::to_string(s.scene_id) + " has no agents");
        b.agent_counts.push_back(s.agents.size());
        b.scene_ids.push_back(s.scene_id);
        for (std::size_t a = 0; a < s.agents.size(); ++a) {
            const SceneAgent &agent = s.agents[a];
            if (agent.past.extent(0) != past_len || agent.future.extent(0) != future_len) {
                throw DataError("pad_batch: scene " + std::to_string(s.scene_id) + " has mismatched block lengths");
            }
            b.valid[i * n_max + a] = 1;
            T *past = b.past.data() + (i * n_max + a) * past_len * kVariates;
            T *future = b.future.data() + (i * n_max + a) * future_len * kVariates;
            for (std::size_t e = 0; e < past_len * kVariates; ++e) past[e] = static_cast<T>(agent.past[e]);
            for (std::size_t e = 0; e < future_len * kVariates; ++e) future[e] = static_cast<T>(agent.future[e]);
        }
    }
    return b;
}

template <typename T>
Batch<T> pad_batch(const std::vector<Scene> &scenes, std::size_t n_max) {
    std::vector<const Scene *> ptrs;
    ptrs.reserve(scenes.size());
    for (const auto &s : scenes) ptrs.push_back(&s);
    return pad_batch<T>(ptrs, n_max);
}

template Batch<float> pad_batch<float>(const std::vector<const Scene *> &, std::size_t);
template Batch<double> pad_batch<double>(const std::vector<const Scene *> &, std::size_t);
template Batch<float> pad_batch<float>(const std::vector<Scene> &, std::size_t);
template Batch<double> pad_batch<double>(const std::vector<Scene> &, std::size_t);

} // namespace maiformer::data
