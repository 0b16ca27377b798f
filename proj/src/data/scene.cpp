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


#include "maiformer/data/scene.hpp"

#include <algorithm>
#include <numeric>

namespace maiformer::data {

SceneBuildResult build_scenes(const std::vector<ResampledTrack> &tracks, const SceneOptions &options) {
    if (options.past_steps == 0 || options.future_steps == 0 || options.stride == 0) {
        throw DataError("build_scenes: window lengths and stride must be positive");
    }
    SceneBuildResult result;
    const auto window = static_cast<std::int64_t>(options.past_steps + options.future_steps);
    double interval = 0.0;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (static_cast<std::int64_t>(tracks[i].length()) < window) continue;
        if (interval == 0.0) interval = tracks[i].interval;
        if (tracks[i].interval != interval) throw DataError("build_scenes: tracks do not share a time base");
        order.push_back(i);
    }
    if (order.empty()) return result;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (tracks[a].start_step != tracks[b].start_step) return tracks[a].start_step < tracks[b].start_step;
        return tracks[a].flight_id < tracks[b].flight_id;
    });

    std::int64_t first = tracks[order.front()].start_step;
    std::int64_t last = first;
    for (std::size_t i : order) last = std::max(last, tracks[i].end_step() - window);

    // `open` holds tracks whose start is <= the window start, in start order.
    std::vector<std::size_t> open;
    std::size_t next = 0;
    const auto stride = static_cast<std::int64_t>(options.stride);
    for (std::int64_t s = first; s <= last; s += stride) {
        ++result.windows_scanned;
        while (next < order.size() && tracks[order[next]].start_step <= s) open.push_back(order[next++]);
        std::erase_if(open, [&](std::size_t i) { return tracks[i].end_step() < s + window; });
        if (open.empty()) continue;
        if (open.size() > options.max_agents) {
            ++result.dropped_over_capacity;
            continue;
        }
        if (open.size() == 1 && !options.keep_single_agent) {
            ++result.dropped_single_agent;
            continue;
        }
        Scene scene;
        scene.scene_id = result.scenes.size();
        scene.t0 = static_cast<double>(s) * interval;
        for (std::size_t i : open) {
            const ResampledTrack &tr = tracks[i];
            const auto offset = static_cast<std::size_t>(s - tr.start_step);
            SceneAgent agent;
            agent.flight_id = tr.flight_id;
            agent.past = num::Array<double>(num::Shape{options.past_steps, kVariates});
            agent.future = num::Array<double>(num::Shape{options.future_steps, kVariates});
            for (std::size_t t = 0; t < options.past_steps; ++t)
                for (std::size_t v = 0; v < kVariates; ++v) agent.past(t, v) = tr.values(offset + t, v);
            for (std::size_t t = 0; t < options.future_steps; ++t)
                for (std::size_t v = 0; v < kVariates; ++v)
                    agent.future(t, v) = tr.values(offset + options.past_steps + t, v);
            scene.agents.push_back(std::move(agent));
        }
        result.scenes.push_back(std::move(scene));
    }
    return result;
}

SplitCounts split_counts(std::size_t n) {
    SplitCounts c;
    c.train = n * 8 / 10;
    c.val = (n - c.train) / 2;
    c.test = n - c.train - c.val;
    return c;
}

DatasetSplit split_dataset(std::vector<Scene> scenes) {
    if (scenes.size() < 10) {
        throw DataError("split_dataset: need at least 10 scenes, got " + std::to_string(scenes.size()));
    }
    for (std::size_t i = 1; i < scenes.size(); ++i) {
        if (scenes[i].t0 < scenes[i - 1].t0) throw DataError("split_dataset: scenes are not sorted by t0");
    }
    const SplitCounts c = split_counts(scenes.size());
    DatasetSplit out;
    auto it = std::make_move_iterator(scenes.begin());
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(c.train));
    it += static_cast<std::ptrdiff_t>(c.train);
    out.val.assign(it, it + static_cast<std::ptrdiff_t>(c.val));
    it += static_cast<std::ptrdiff_t>(c.val);
    out.test.assign(it, std::make_move_iterator(scenes.end()));
    return out;
}

} // namespace maiformer::data
