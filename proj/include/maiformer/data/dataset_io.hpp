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

#include <filesystem>
#include <vector>

#include "maiformer/data/scene.hpp"

namespace maiformer::data {

/// Block lengths recorded in a scene file's header line.
struct SceneFileHeader {
    std::size_t past_steps = 20;
    std::size_t future_steps = 20;
    double interval_s = kResampleInterval;
    std::size_t count = 0;
};

// One JSON object per line. Line 1 is the header
//   {"format":"maiformer-scenes","version":1,"T":..,"S":..,"F":3,...}
// and every following line a scene in physical units:
//   {"scene_id":..,"t0":..,"agents":[{"flight_id":..,"past":[[lat,lon,alt],..],"future":[..]}]}
void write_scenes(const std::filesystem::path &path, const std::vector<Scene> &scenes, const SceneFileHeader &header);
std::vector<Scene> read_scenes(const std::filesystem::path &path, SceneFileHeader *header = nullptr);

} // namespace maiformer::data
