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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "maiformer/numerics/array.hpp"

namespace maiformer::data {

/// lat (deg), lon (deg), alt (ft).
inline constexpr std::size_t kVariates = 3;
inline constexpr double kResampleInterval = 6.0;
inline const char *const kVariateNames[kVariates] = {"lat_deg", "lon_deg", "alt_ft"};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrackPoint {
    double t = 0.0; // seconds
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0; // feet
};

struct RawTrack {
    std::string flight_id;
    std::vector<TrackPoint> points;
};

/// Throws DataError unless timestamps strictly increase, there are at least
/// two points and coordinates are in range.
void validate(const RawTrack &track);

/// Samples on the absolute grid t = k * interval. values is [count, 3].
struct ResampledTrack {
    std::string flight_id;
    std::int64_t start_step = 0;
    double interval = kResampleInterval;
    num::Array<double> values;

    std::size_t length() const { return values.empty() ? 0 : values.extent(0); }
    double start_time() const { return static_cast<double>(start_step) * interval; }
    std::int64_t end_step() const { return start_step + static_cast<std::int64_t>(length()); } // exclusive
};

// Delimited text: header `flight_id,timestamp_s,lat_deg,lon_deg,alt_ft`,
// one point per row, rows of a flight contiguous or not.
void write_tracks_csv(const std::filesystem::path &path, const std::vector<RawTrack> &tracks);
std::vector<RawTrack> read_tracks_csv(const std::filesystem::path &path);

} // namespace maiformer::data
