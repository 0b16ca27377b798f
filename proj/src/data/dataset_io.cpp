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


#include "maiformer/data/dataset_io.hpp"

#include <fstream>

#include "json.hpp"

namespace maiformer::data {

namespace {

using nlohmann::json;

constexpr const char *kFormat = "maiformer-scenes";
constexpr int kVersion = 1;

json block_to_json(const num::Array<double> &block) {
    json rows = json::array();
    for (std::size_t t = 0; t < block.extent(0); ++t) rows.push_back({block(t, 0), block(t, 1), block(t, 2)});
    return rows;
}

num::Array<double> block_from_json(const json &rows, std::size_t steps, const std::string &where) {
    if (!rows.is_array() || rows.size() != steps) {
        throw DataError(where + ": expected " + std::to_string(steps) + " time steps");
    }
    num::Array<double> out(num::Shape{steps, kVariates});
    for (std::size_t t = 0; t < steps; ++t) {
        if (!rows[t].is_array() || rows[t].size() != kVariates) throw DataError(where + ": malformed step");
        for (std::size_t v = 0; v < kVariates; ++v) out(t, v) = rows[t][v].get<double>();
    }
    return out;
}

} // namespace

void write_scenes(const std::filesystem::path &path, const std::vector<Scene> &scenes, const SceneFileHeader &header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    json head = {{"format", kFormat},
                 {"version", kVersion},
                 {"T", header.past_steps},
                 {"S", header.future_steps},
                 {"F", kVariates},
                 {"interval_s", header.interval_s},
                 {"variates", {kVariateNames[0], kVariateNames[1], kVariateNames[2]}},
                 {"count", scenes.size()}};
    out << head.dump() << '\n';
    for (const auto &scene : scenes) {
        json agents = json::array();
        for (const auto &a : scene.agents) {
            if (a.past.extent(0) != header.past_steps || a.future.extent(0) != header.future_steps) {
                throw DataError("write_scenes: scene " + std::to_string(scene.scene_id) +
                                " does not match the header block lengths");
            }
            agents.push_back({{"flight_id", a.flight_id}, {"past", block_to_json(a.past)},
                              {"future", block_to_json(a.future)}});
        }
        json rec = {{"scene_id", scene.scene_id}, {"t0", scene.t0}, {"agents", std::move(agents)}};
        out << rec.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Scene> read_scenes(const std::filesystem::path &path, SceneFileHeader *header_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty scene file");
    SceneFileHeader header;
    try {
        const json head = json::parse(line);
        if (head.at("format") != kFormat) throw DataError(path.string() + ": not a scene file");
        if (head.at("version").get<int>() != kVersion) {
            throw DataError(path.string() + ": unsupported scene file version " + head.at("version").dump());
        }
        if (head.at("F").get<std::size_t>() != kVariates) throw DataError(path.string() + ": expected F=3");
        header.past_steps = head.at("T").get<std::size_t>();
        header.future_steps = head.at("S").get<std::size_t>();
        header.interval_s = head.at("interval_s").get<double>();
        header.count = head.at("count").get<std::size_t>();
    } catch (const json::exception &e) {
        throw DataError(path.string() + ": bad header: " + e.what());
    }

    std::vector<Scene> scenes;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        try {
            const json rec = json::parse(line);
            Scene s;
            s.scene_id = rec.at("scene_id").get<std::uint64_t>();
            s.t0 = rec.at("t0").get<double>();
            for (const auto &a : rec.at("agents")) {
                SceneAgent agent;
                agent.flight_id = a.at("flight_id").get<std::string>();
                agent.past = block_from_json(a.at("past"), header.past_steps, where);
                agent.future = block_from_json(a.at("future"), header.future_steps, where);
                s.agents.push_back(std::move(agent));
            }
            if (s.agents.empty()) throw DataError(where + ": scene without agents");
            scenes.push_back(std::move(s));
        } catch (const json::exception &e) {
            throw DataError(where + ": " + e.what());
        }
    }
    if (scenes.size() != header.count) {
        throw DataError(path.string() + ": header promises " + std::to_string(header.count) + " scenes, found " +
                        std::to_string(scenes.size()));
    }
    if (header_out != nullptr) *header_out = header;
    return scenes;
}

} // namespace maiformer::data
