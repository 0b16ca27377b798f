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

#include "maiformer/eval/attention_report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace maiformer::eval {

namespace {

std::string xml_escape(const std::string &in) {
    std::string out;
    for (char c : in) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::vector<double> heat_scale(const std::vector<double> &scores) {
    if (scores.empty()) return {};
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size(), 1.0);
    if (*hi > *lo) {
        for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - *lo) / (*hi - *lo);
    }
    return out;
}

AttentionReport attention_report(const model::AttentionRecord &record, std::size_t scene, std::size_t query_agent,
                                 const std::vector<std::array<double, 3>> &positions) {
    if (record.aa.empty()) throw std::invalid_argument("attention report: model has no agent attention");
    if (scene >= record.batch) throw std::invalid_argument("attention report: scene index out of range");
    const std::size_t N = record.agents;
    std::vector<std::size_t> real;
    for (std::size_t i = 0; i < N; ++i)
        if (record.validity[scene * N + i]) real.push_back(i);
    if (query_agent >= N || !record.validity[scene * N + query_agent]) {
        throw std::invalid_argument("attention report: query agent " + std::to_string(query_agent) +
                                    " is not a real agent of the scene");
    }
    if (positions.size() != real.size()) {
        throw std::invalid_argument("attention report: expected " + std::to_string(real.size()) + " positions");
    }
    auto id_of = [&](std::size_t i) {
        const std::size_t k = scene * N + i;
        return k < record.agent_ids.size() ? record.agent_ids[k] : std::to_string(i);
    };

    AttentionReport rep;
    rep.scene_id = scene < record.scene_ids.size() ? record.scene_ids[scene] : scene;
    rep.query_agent = query_agent;
    rep.query_id = id_of(query_agent);
    for (std::size_t l = 0; l < record.layers(); ++l) {
        std::vector<std::optional<std::size_t>> heads;
        for (std::size_t h = 0; h < record.heads; ++h) heads.emplace_back(h);
        heads.emplace_back(std::nullopt);
        for (const auto &h : heads) {
            const auto row = model::extract_attention(record, l, h, scene, query_agent);
            std::vector<double> scores;
            for (std::size_t i : real) scores.push_back(row[i]);
            const auto heat = heat_scale(scores);
            AttentionView view;
            view.layer = l;
            view.head = h;
            for (std::size_t k = 0; k < real.size(); ++k) {
                view.scores.push_back({real[k], id_of(real[k]), scores[k], heat[k], positions[k]});
            }
            rep.views.push_back(std::move(view));
        }
    }
    return rep;
}

nlohmann::json to_json(const AttentionReport &report) {
    nlohmann::json views = nlohmann::json::array();
    for (const auto &v : report.views) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &s : v.scores) {
            rows.push_back({{"agent", s.agent},
                            {"flight_id", s.flight_id},
                            {"score", s.score},
                            {"heat", s.heat},
                            {"lat_deg", s.position[0]},
                            {"lon_deg", s.position[1]},
                            {"alt_ft", s.position[2]}});
        }
        views.push_back({{"layer", v.layer},
                         {"head", v.head ? nlohmann::json(*v.head) : nlohmann::json("mean")},
                         {"scores", rows}});
    }
    return {{"scene_id", report.scene_id},
            {"query_agent", report.query_agent},
            {"query_id", report.query_id},
            {"views", views}};
}

std::string attention_svg(const AttentionReport &report, const AttentionView &view) {
    constexpr double size = 480.0, margin = 48.0;
    double lat_lo = 1e300, lat_hi = -1e300, lon_lo = 1e300, lon_hi = -1e300;
    for (const auto &s : view.scores) {
        lat_lo = std::min(lat_lo, s.position[0]);
        lat_hi = std::max(lat_hi, s.position[0]);
        lon_lo = std::min(lon_lo, s.position[1]);
        lon_hi = std::max(lon_hi, s.position[1]);
    }
    // Equal scale on both axes, centred.
    const double span = std::max({lat_hi - lat_lo, lon_hi - lon_lo, 1e-6});
    const double lat_mid = 0.5 * (lat_lo + lat_hi), lon_mid = 0.5 * (lon_lo + lon_hi);
    auto px = [&](double lon) { return size / 2 + (lon - lon_mid) / span * (size - 2 * margin); };
    auto py = [&](double lat) { return size / 2 - (lat - lat_mid) / span * (size - 2 * margin); };

    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                  size, size, size, size);
    svg += buf;
    const std::string head = view.head ? "head " + std::to_string(*view.head) : "head mean";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"12\">scene %llu, query %s, layer %zu, "
                  "%s</text>\n",
                  static_cast<unsigned long long>(report.scene_id), xml_escape(report.query_id).c_str(), view.layer,
                  head.c_str());
    svg += buf;
    for (const auto &s : view.scores) {
        const int red = static_cast<int>(255.0 * s.heat + 0.5);
        const int blue = 255 - red;
        const double x = px(s.position[1]), y = py(s.position[0]);
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"10\" fill=\"rgb(%d,0,%d)\"%s/>\n", x, y,
                      red, blue, s.agent == report.query_agent ? " stroke=\"black\" stroke-width=\"3\"" : "");
        svg += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"11\">%s %.3f</text>\n",
                      x + 13, y + 4, xml_escape(s.flight_id).c_str(), s.score);
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace maiformer::eval
