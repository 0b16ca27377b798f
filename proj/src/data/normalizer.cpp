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


#include "maiformer/data/normalizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "maiformer/util/hash.hpp"

namespace maiformer::data {

namespace {

constexpr const char *kMagic = "maiformer-normstats";
constexpr int kVersion = 1;

template <typename Fn>
Scene map_scene(const Scene &scene, Fn &&fn) {
    Scene out = scene;
    for (auto &agent : out.agents) {
        for (auto *block : {&agent.past, &agent.future}) {
            for (std::size_t t = 0; t < block->extent(0); ++t)
                for (std::size_t v = 0; v < kVariates; ++v) (*block)(t, v) = fn(v, (*block)(t, v));
        }
    }
    return out;
}

} // namespace

NormStats fit_normalizer(const std::vector<Scene> &train_scenes) {
    NormStats s;
    s.min.fill(std::numeric_limits<double>::infinity());
    s.max.fill(-std::numeric_limits<double>::infinity());
    bool any = false;
    for (const auto &scene : train_scenes) {
        for (const auto &agent : scene.agents) {
            for (const auto *block : {&agent.past, &agent.future}) {
                for (std::size_t t = 0; t < block->extent(0); ++t) {
                    for (std::size_t v = 0; v < kVariates; ++v) {
                        s.min[v] = std::min(s.min[v], (*block)(t, v));
                        s.max[v] = std::max(s.max[v], (*block)(t, v));
                        any = true;
                    }
                }
            }
        }
    }
    if (!any) throw DataError("fit_normalizer: training split is empty");
    for (std::size_t v = 0; v < kVariates; ++v) {
        if (!(s.max[v] > s.min[v])) {
            throw DataError(std::string("fit_normalizer: variate ") + kVariateNames[v] + " is constant");
        }
    }
    return s;
}

Scene normalize(const Scene &scene, const NormStats &stats) {
    return map_scene(scene, [&](std::size_t v, double x) { return stats.normalize(v, x); });
}

Scene denormalize(const Scene &scene, const NormStats &stats) {
    return map_scene(scene, [&](std::size_t v, double x) { return stats.denormalize(v, x); });
}

std::vector<Scene> normalize_all(const std::vector<Scene> &scenes, const NormStats &stats) {
    std::vector<Scene> out;
    out.reserve(scenes.size());
    for (const auto &s : scenes) out.push_back(normalize(s, stats));
    return out;
}

std::string to_text(const NormStats &stats) {
    std::string out = std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
    char buf[96];
    for (std::size_t v = 0; v < kVariates; ++v) {
        std::snprintf(buf, sizeof(buf), "%s %.17g %.17g\n", kVariateNames[v], stats.min[v], stats.max[v]);
        out += buf;
    }
    return out;
}

NormStats norm_stats_from_text(const std::string &text) {
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) throw DataError("norm stats: missing header");
    if (version != kVersion) throw DataError("norm stats: unsupported version " + std::to_string(version));
    NormStats s;
    for (std::size_t v = 0; v < kVariates; ++v) {
        std::string name, lo, hi;
        if (!(in >> name >> lo >> hi) || name != kVariateNames[v]) {
            throw DataError(std::string("norm stats: expected entry for ") + kVariateNames[v]);
        }
        s.min[v] = std::stod(lo);
        s.max[v] = std::stod(hi);
        if (!(s.max[v] > s.min[v])) throw DataError(std::string("norm stats: empty range for ") + kVariateNames[v]);
    }
    return s;
}

void save_norm_stats(const std::filesystem::path &path, const NormStats &stats) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << to_text(stats);
}

NormStats load_norm_stats(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return norm_stats_from_text(ss.str());
}

std::string norm_stats_hash(const NormStats &stats) { return util::hex64(util::fnv1a64(to_text(stats))); }

} // namespace maiformer::data
