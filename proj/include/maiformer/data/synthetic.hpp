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

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "maiformer/data/raw_track.hpp"

namespace maiformer::data {

/// Local flat frame around the merge point, nautical miles (x east, y north).
struct Waypoint {
    double x_nm = 0.0;
    double y_nm = 0.0;
};

/// Arrival route up to (not including) the merge point; the first waypoint
/// is where aircraft appear.
struct ArrivalStream {
    std::vector<Waypoint> waypoints;
};

struct SyntheticConfig {
    // Approximate number of sliding windows the traffic should fill; arrivals
    // stop after num_scenes * 6 s and the airborne aircraft then land.
    std::size_t num_scenes = 2000;
    double mean_agents = 4.0;    // target mean airborne count, sets the arrival rate
    std::size_t max_agents = 10; // arrivals wait while this many are airborne

    double merge_lat_deg = 37.5;
    double merge_lon_deg = 126.5;
    std::vector<ArrivalStream> streams = default_streams();
    Waypoint threshold{0.0, -9.0}; // end of the common final leg

    double entry_alt_ft = 11000.0;
    double threshold_alt_ft = 1200.0;
    double descent_ft_per_nm = 300.0;

    double min_speed_kt = 160.0;
    double max_speed_kt = 250.0;
    double max_accel_kt_per_s = 1.5;
    double speed_hold_mean_s = 120.0; // mean dwell of a speed preference

    // In-trail coupling along the distance-to-threshold axis.
    bool follower_coupling = true;
    double min_separation_nm = 3.0;    // hard floor between consecutive aircraft
    double target_separation_nm = 5.0; // followers steer toward this gap
    double coupling_gain_kt_per_nm = 25.0;

    double noise_scale = 1.0;
    double horizontal_sigma_nm = 0.02;
    double vertical_sigma_ft = 20.0;
    int report_interval_min_s = 2; // integer seconds, inclusive range
    int report_interval_max_s = 8;

    double start_time_s = 0.0;
    std::uint64_t seed = 1;

    static std::vector<ArrivalStream> default_streams();
    void validate() const;
};

nlohmann::json to_json(const SyntheticConfig &config);
/// Overlays the keys present in j onto base; unknown keys are an error.
/// Streams are [[[x, y], ...], ...] in NM, the threshold [x, y].
SyntheticConfig synthetic_config_from_json(const nlohmann::json &j, SyntheticConfig base = {});

/// Deterministic arrival traffic. Flight ids are a stream letter followed by
/// a five-digit serial ("A00003").
std::vector<RawTrack> generate_synthetic_traffic(const SyntheticConfig &config);

/// Full polyline of a stream: its waypoints, the merge point, the threshold.
std::vector<Waypoint> stream_route(const SyntheticConfig &config, std::size_t stream);

/// Flat-earth conversions about the merge point.
void local_to_geo(const SyntheticConfig &config, double x_nm, double y_nm, double &lat, double &lon);
void geo_to_local(const SyntheticConfig &config, double lat, double lon, double &x_nm, double &y_nm);

} // namespace maiformer::data
