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

#include "maiformer/data/normalizer.hpp"
#include "maiformer/data/pipeline.hpp"
#include "maiformer/data/synthetic.hpp"

namespace maiformer::testing {

/// Synthetic traffic run through the full preparation pipeline, with
/// normalized copies of every split.
struct SyntheticDataset {
    data::PreparedDataset prepared;
    std::vector<data::Scene> train, val, test; // normalized
};

inline SyntheticDataset synthetic_dataset(std::size_t num_scenes, std::uint64_t seed,
                                          const data::SceneOptions &options = {}) {
    data::SyntheticConfig cfg;
    cfg.num_scenes = num_scenes;
    cfg.seed = seed;
    SyntheticDataset out;
    out.prepared = data::prepare_dataset(data::generate_synthetic_traffic(cfg), options);
    out.train = data::normalize_all(out.prepared.split.train, out.prepared.stats);
    out.val = data::normalize_all(out.prepared.split.val, out.prepared.stats);
    out.test = data::normalize_all(out.prepared.split.test, out.prepared.stats);
    return out;
}

} // namespace maiformer::testing
