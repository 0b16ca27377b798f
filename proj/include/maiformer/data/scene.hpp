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
#include <cstdint>
#include <string>
#include <vector>

#include "maiformer/data/raw_track.hpp"

namespace maiformer::data {

struct SceneAgent {
    std::string flight_id;
    num::Array<double> past;   // [T, 3]
    num::Array<double> future; // [S, 3]
};

struct Scene {
    std::uint64_t scene_id = 0;
    double t0 = 0.0; // time of the first past step, seconds
    std::vector<SceneAgent> agents;

    std::size_t agent_count() const { return agents.size(); }
};

struct SceneOptions {
    std::size_t past_steps = 20;
    std::size_t future_steps = 20;
    std::size_t stride = 1;      // window advance, in resampling steps
    std::size_t max_agents = 10; // windows with more aircraft are dropped
    bool keep_single_agent = true;
};

struct SceneBuildResult {
    std::vector<Scene> scenes;
    std::size_t windows_scanned = 0;
    std::size_t dropped_over_capacity = 0;
    std::size_t dropped_single_agent = 0;
};

/// Slides a T+S window over the shared 6 s grid. A track joins a window only
/// if it covers every step of it. Agents are ordered by (start, flight_id);
/// scene ids count up from zero in t0 order.
SceneBuildResult build_scenes(const std::vector<ResampledTrack> &tracks, const SceneOptions &options = {});

struct DatasetSplit {
    std::vector<Scene> train, val, test;
};

/// Chronological 8:1:1 split: floor(0.8 n) training scenes, the remainder
/// halved (extra scene to test). Scenes must be sorted by t0.
DatasetSplit split_dataset(std::vector<Scene> scenes);

struct SplitCounts {
    std::size_t train = 0, val = 0, test = 0;
};
SplitCounts split_counts(std::size_t n);

} // namespace maiformer::data
