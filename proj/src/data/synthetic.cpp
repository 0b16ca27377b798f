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


#include "maiformer/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace maiformer::data {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

struct Route {
    std::vector<Waypoint> points;
    std::vector<double> cumulative; // arc length from the first point
    double length() const { return cumulative.back(); }

    // Point at distance-to-go d from the end.
    Waypoint at(double d) const {
        const double s = std::clamp(length() - d, 0.0, length());
        std::size_t i = 1;
        while (i + 1 < points.size() && cumulative[i] < s) ++i;
        const double seg = cumulative[i] - cumulative[i - 1];
        const double u = seg > 0.0 ? (s - cumulative[i - 1]) / seg : 0.0;
        return {points[i - 1].x_nm + u * (points[i].x_nm - points[i - 1].x_nm),
                points[i - 1].y_nm + u * (points[i].y_nm - points[i - 1].y_nm)};
    }
};

Route make_route(std::vector<Waypoint> pts) {
    Route r;
    r.points = std::move(pts);
    r.cumulative.push_back(0.0);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        r.cumulative.push_back(r.cumulative.back() + std::hypot(r.points[i].x_nm - r.points[i - 1].x_nm,
                                                                r.points[i].y_nm - r.points[i - 1].y_nm));
    }
    return r;
}

struct Aircraft {
    std::size_t stream = 0;
    double d = 0.0;        // distance to threshold, NM
    double d_free = 0.0;   // same, before clamping at the threshold
    double speed = 0.0;    // kt
    double preferred = 0.0;
    double next_pref_change = 0.0;
    int next_report = 0;
    RawTrack track;
};

} // namespace

std::vector<ArrivalStream> SyntheticConfig::default_streams() {
    return {
        ArrivalStream{{{-10.0, 45.0}, {-8.0, 22.0}}},
        ArrivalStream{{{40.0, 20.0}, {18.0, 6.0}}},
        ArrivalStream{{{-42.0, -6.0}, {-20.0, 4.0}}},
    };
}

void SyntheticConfig::validate() const {
    if (streams.empty()) throw DataError("synthetic: at least one arrival stream is required");
    for (const auto &s : streams) {
        if (s.waypoints.empty()) throw DataError("synthetic: stream without waypoints");
    }
    if (streams.size() > 26) throw DataError("synthetic: at most 26 streams");
    if (!(mean_agents > 0.0)) throw DataError("synthetic: mean_agents must be positive");
    if (max_agents == 0) throw DataError("synthetic: max_agents must be positive");
    if (!(min_speed_kt > 0.0) || !(max_speed_kt > min_speed_kt)) throw DataError("synthetic: bad speed bounds");
    if (!(max_accel_kt_per_s > 0.0) || !(speed_hold_mean_s > 0.0)) throw DataError("synthetic: bad speed dynamics");
    if (!(min_separation_nm >= 0.0) || target_separation_nm < min_separation_nm) {
        throw DataError("synthetic: target separation must be at least the minimum separation");
    }
    if (noise_scale < 0.0 || horizontal_sigma_nm < 0.0 || vertical_sigma_ft < 0.0) {
        throw DataError("synthetic: noise parameters must be non-negative");
    }
    if (report_interval_min_s < 1 || report_interval_max_s < report_interval_min_s) {
        throw DataError("synthetic: bad report interval range");
    }
    if (std::abs(merge_lat_deg) > 80.0 || std::abs(merge_lon_deg) > 179.0) {
        throw DataError("synthetic: merge point too close to a pole or the antimeridian");
    }
}

// Scalar fields shared by both JSON directions.
#define MAIFORMER_SYNTH_FIELDS(X)                                                                                     \
    X(num_scenes) X(mean_agents) X(max_agents) X(merge_lat_deg) X(merge_lon_deg) X(entry_alt_ft) X(threshold_alt_ft)  \
    X(descent_ft_per_nm) X(min_speed_kt) X(max_speed_kt) X(max_accel_kt_per_s) X(speed_hold_mean_s)                \
    X(follower_coupling) X(min_separation_nm) X(target_separation_nm) X(coupling_gain_kt_per_nm) X(noise_scale)     \
    X(horizontal_sigma_nm) X(vertical_sigma_ft) X(report_interval_min_s) X(report_interval_max_s) X(start_time_s)   \
    X(seed)

nlohmann::json to_json(const SyntheticConfig &c) {
    nlohmann::json j;
#define X(name) j[#name] = c.name;
    MAIFORMER_SYNTH_FIELDS(X)
#undef X
    nlohmann::json streams = nlohmann::json::array();
    for (const auto &s : c.streams) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto &w : s.waypoints) pts.push_back({w.x_nm, w.y_nm});
        streams.push_back(pts);
    }
    j["streams"] = streams;
    j["threshold"] = {c.threshold.x_nm, c.threshold.y_nm};
    return j;
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json &j, SyntheticConfig c) {
    if (!j.is_object()) throw DataError("synthetic config: expected a JSON object");
    auto point = [](const nlohmann::json &p) {
        if (!p.is_array() || p.size() != 2) throw DataError("synthetic config: a point is [x_nm, y_nm]");
        return Waypoint{p[0].get<double>(), p[1].get<double>()};
    };
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "streams") {
                c.streams.clear();
                for (const auto &s : value) {
                    ArrivalStream stream;
                    for (const auto &p : s) stream.waypoints.push_back(point(p));
                    c.streams.push_back(std::move(stream));
                }
                continue;
            }
            if (key == "threshold") {
                c.threshold = point(value);
                continue;
            }
#define X(name)                                                                                                        \
    if (key == #name) {                                                                                                \
        c.name = value.get<decltype(c.name)>();                                                                        \
        continue;                                                                                                      \
    }
            MAIFORMER_SYNTH_FIELDS(X)
#undef X
            throw DataError("synthetic config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("synthetic config: ") + e.what());
    }
    c.validate();
    return c;
}

#undef MAIFORMER_SYNTH_FIELDS

std::vector<Waypoint> stream_route(const SyntheticConfig &config, std::size_t stream) {
    std::vector<Waypoint> pts = config.streams.at(stream).waypoints;
    pts.push_back({0.0, 0.0});
    pts.push_back(config.threshold);
    return pts;
}

void local_to_geo(const SyntheticConfig &config, double x_nm, double y_nm, double &lat, double &lon) {
    lat = config.merge_lat_deg + y_nm / 60.0;
    lon = config.merge_lon_deg + x_nm / (60.0 * std::cos(config.merge_lat_deg * kDegToRad));
}

void geo_to_local(const SyntheticConfig &config, double lat, double lon, double &x_nm, double &y_nm) {
    y_nm = (lat - config.merge_lat_deg) * 60.0;
    x_nm = (lon - config.merge_lon_deg) * 60.0 * std::cos(config.merge_lat_deg * kDegToRad);
}

std::vector<RawTrack> generate_synthetic_traffic(const SyntheticConfig &config) {
    config.validate();
    std::vector<RawTrack> finished;
    if (config.num_scenes == 0) return finished;

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> report_gap(config.report_interval_min_s, config.report_interval_max_s);
    const double pref_lo = config.min_speed_kt + 0.2 * (config.max_speed_kt - config.min_speed_kt);
    auto draw_preference = [&] { return pref_lo + (config.max_speed_kt - pref_lo) * unit(rng); };
    auto draw_exp = [&](double mean) { return -mean * std::log1p(-unit(rng)); };

    std::vector<Route> routes;
    double mean_length = 0.0;
    for (std::size_t s = 0; s < config.streams.size(); ++s) {
        routes.push_back(make_route(stream_route(config, s)));
        mean_length += routes.back().length() / static_cast<double>(config.streams.size());
    }
    const double mean_speed = 0.5 * (pref_lo + config.max_speed_kt);
    const double flight_time_s = mean_length / mean_speed * 3600.0;
    const double stream_gap_mean = flight_time_s * static_cast<double>(config.streams.size()) / config.mean_agents;

    std::vector<double> next_arrival(config.streams.size());
    for (auto &t : next_arrival) t = draw_exp(stream_gap_mean);
    next_arrival[0] = 0.0;
    std::vector<std::size_t> serial(config.streams.size(), 0);

    const double vertical_span = config.entry_alt_ft - config.threshold_alt_ft;
    auto altitude = [&](double d) {
        if (vertical_span <= 0.0) return config.threshold_alt_ft;
        return config.threshold_alt_ft + vertical_span * std::tanh(config.descent_ft_per_nm * d / vertical_span);
    };
    auto report = [&](Aircraft &ac, int t) {
        const Waypoint p = routes[ac.stream].at(ac.d);
        const double sh = config.noise_scale * config.horizontal_sigma_nm;
        const double sv = config.noise_scale * config.vertical_sigma_ft;
        double x = p.x_nm, y = p.y_nm, alt = altitude(ac.d);
        if (sh > 0.0) {
            x += sh * gauss(rng);
            y += sh * gauss(rng);
        }
        if (sv > 0.0) alt += sv * gauss(rng);
        TrackPoint pt;
        pt.t = config.start_time_s + t;
        local_to_geo(config, x, y, pt.lat, pt.lon);
        pt.alt = alt;
        ac.track.points.push_back(pt);
    };

    const int spawn_until = static_cast<int>(config.num_scenes) * static_cast<int>(kResampleInterval);
    std::vector<Aircraft> airborne;
    for (int t = 0; t < spawn_until || !airborne.empty(); ++t) {
        if (t > 0) {
            // Sequence by distance to go: each aircraft follows the one just ahead.
            std::stable_sort(airborne.begin(), airborne.end(),
                             [](const Aircraft &a, const Aircraft &b) { return a.d < b.d; });
            for (std::size_t i = 0; i < airborne.size(); ++i) {
                Aircraft &ac = airborne[i];
                if (t >= ac.next_pref_change) {
                    ac.preferred = draw_preference();
                    ac.next_pref_change = t + draw_exp(config.speed_hold_mean_s);
                }
                double v = ac.preferred;
                const Aircraft *lead = (config.follower_coupling && i > 0) ? &airborne[i - 1] : nullptr;
                if (lead != nullptr) {
                    const double gap = ac.d - lead->d;
                    v = std::min(v, lead->speed + config.coupling_gain_kt_per_nm * (gap - config.target_separation_nm));
                }
                v = std::clamp(v, ac.speed - config.max_accel_kt_per_s, ac.speed + config.max_accel_kt_per_s);
                v = std::clamp(v, config.min_speed_kt, config.max_speed_kt);
                double d = ac.d - v / 3600.0;
                if (lead != nullptr) d = std::max(d, lead->d_free + config.min_separation_nm);
                ac.speed = (ac.d - d) * 3600.0;
                ac.d_free = d;
                ac.d = std::max(d, 0.0);
                if (ac.d == 0.0 || t >= ac.next_report) {
                    report(ac, t);
                    ac.next_report = t + report_gap(rng);
                }
            }
            for (auto it = airborne.begin(); it != airborne.end();) {
                if (it->d == 0.0) {
                    finished.push_back(std::move(it->track));
                    it = airborne.erase(it);
                } else {
                    ++it;
                }
            }
        }
        if (t >= spawn_until) continue;
        for (std::size_t s = 0; s < config.streams.size(); ++s) {
            if (t < next_arrival[s]) continue;
            if (airborne.size() >= config.max_agents) continue;
            const double entry = routes[s].length();
            const bool clear = std::all_of(airborne.begin(), airborne.end(), [&](const Aircraft &o) {
                return std::abs(o.d - entry) >= config.target_separation_nm;
            });
            if (!clear) continue; // hold until the entry gap opens
            Aircraft ac;
            ac.stream = s;
            ac.d = entry;
            ac.d_free = entry;
            ac.preferred = draw_preference();
            ac.speed = ac.preferred;
            ac.next_pref_change = t + draw_exp(config.speed_hold_mean_s);
            char id[16];
            std::snprintf(id, sizeof(id), "%c%05zu", static_cast<char>('A' + s), serial[s]++);
            ac.track.flight_id = id;
            report(ac, t);
            ac.next_report = t + report_gap(rng);
            airborne.push_back(std::move(ac));
            next_arrival[s] = t + draw_exp(stream_gap_mean);
        }
    }
    std::stable_sort(finished.begin(), finished.end(), [](const RawTrack &a, const RawTrack &b) {
        return a.points.front().t < b.points.front().t;
    });
    return finished;
}

} // namespace maiformer::data
