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


#include "maiformer/data/raw_track.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace maiformer::data {

namespace {

constexpr const char *kHeader = "flight_id,timestamp_s,lat_deg,lon_deg,alt_ft";

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::filesystem::path &path, std::size_t line) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw DataError(path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(field) + "'");
    }
    return v;
}

} // namespace

void validate(const RawTrack &track) {
    const std::string who = "track '" + track.flight_id + "'";
    if (track.flight_id.empty()) throw DataError("track with empty flight_id");
    if (track.points.size() < 2) throw DataError(who + ": needs at least 2 points");
    for (std::size_t i = 0; i < track.points.size(); ++i) {
        const TrackPoint &p = track.points[i];
        if (!std::isfinite(p.t) || !std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(p.alt)) {
            throw DataError(who + ": non-finite value at point " + std::to_string(i));
        }
        if (p.lat < -90.0 || p.lat > 90.0) throw DataError(who + ": latitude out of range at point " + std::to_string(i));
        if (p.lon < -180.0 || p.lon > 180.0) {
            throw DataError(who + ": longitude out of range at point " + std::to_string(i));
        }
        if (i > 0 && !(p.t > track.points[i - 1].t)) {
            throw DataError(who + ": timestamps not strictly increasing at point " + std::to_string(i));
        }
    }
}

void write_tracks_csv(const std::filesystem::path &path, const std::vector<RawTrack> &tracks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << kHeader << '\n';
    for (const auto &track : tracks) {
        for (const auto &p : track.points) {
            out << track.flight_id << ',' << format_double(p.t) << ',' << format_double(p.lat) << ','
                << format_double(p.lon) << ',' << format_double(p.alt) << '\n';
        }
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<RawTrack> read_tracks_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw DataError(path.string() + ": unexpected header '" + line + "'");

    std::vector<RawTrack> tracks;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 5) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
        }
        const std::string id(fields[0]);
        auto [it, fresh] = index.emplace(id, tracks.size());
        if (fresh) tracks.push_back(RawTrack{id, {}});
        tracks[it->second].points.push_back(TrackPoint{parse_double(fields[1], path, lineno),
                                                       parse_double(fields[2], path, lineno),
                                                       parse_double(fields[3], path, lineno),
                                                       parse_double(fields[4], path, lineno)});
    }
    return tracks;
}

} // namespace maiformer::data
