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

#include "maiformer/data/pipeline.hpp"

#include "maiformer/data/pchip.hpp"

namespace maiformer::data {

PreparedDataset prepare_dataset(const std::vector<RawTrack> &tracks, const SceneOptions &options) {
    PreparedDataset out;
    std::vector<ResampledTrack> resampled;
    resampled.reserve(tracks.size());
    for (const auto &t : tracks) {
        auto r = pchip_resample(t);
        if (r.length() == 0) {
            ++out.tracks_skipped;
            continue;
        }
        resampled.push_back(std::move(r));
        ++out.tracks_used;
    }
    out.build = build_scenes(resampled, options);
    if (out.build.scenes.empty()) throw DataError("prepare: no usable scenes from " + std::to_string(tracks.size()) + " tracks");
    out.split = split_dataset(std::move(out.build.scenes));
    out.build.scenes.clear();
    out.stats = fit_normalizer(out.split.train);
    return out;
}

} // namespace maiformer::data
