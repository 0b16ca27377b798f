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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maiformer/data/scene.hpp"

namespace maiformer::data {

/// Per-variate min/max fitted on the training split, physical units.
struct NormStats {
    std::array<double, kVariates> min{};
    std::array<double, kVariates> max{};

    double normalize(std::size_t variate, double x) const { return (x - min[variate]) / (max[variate] - min[variate]); }
    double denormalize(std::size_t variate, double x) const { return x * (max[variate] - min[variate]) + min[variate]; }

    bool operator==(const NormStats &) const = default;
};

/// Scans past and future blocks of every agent. Throws DataError when a
/// variate is constant or the set is empty.
NormStats fit_normalizer(const std::vector<Scene> &train_scenes);

Scene normalize(const Scene &scene, const NormStats &stats);
Scene denormalize(const Scene &scene, const NormStats &stats);
std::vector<Scene> normalize_all(const std::vector<Scene> &scenes, const NormStats &stats);

// Text record:
//   maiformer-normstats 1
//   lat_deg <min> <max>
//   lon_deg <min> <max>
//   alt_ft <min> <max>
std::string to_text(const NormStats &stats);
NormStats norm_stats_from_text(const std::string &text);
void save_norm_stats(const std::filesystem::path &path, const NormStats &stats);
NormStats load_norm_stats(const std::filesystem::path &path);

/// FNV-1a 64 of to_text(stats), as 16 hex digits.
std::string norm_stats_hash(const NormStats &stats);

} // namespace maiformer::data
