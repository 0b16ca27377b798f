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
#include "maiformer/data/raw_track.hpp"
#include "maiformer/data/scene.hpp"

namespace maiformer::data {

/// Raw tracks to chronologically split scenes in physical units, with
/// normalization statistics fitted on the training split.
struct PreparedDataset {
    DatasetSplit split;
    NormStats stats;
    SceneBuildResult build; // scenes moved out; counters kept
    std::size_t tracks_used = 0;
    std::size_t tracks_skipped = 0; // no grid point inside the track span
};

PreparedDataset prepare_dataset(const std::vector<RawTrack> &tracks, const SceneOptions &options = {});

} // namespace maiformer::data
