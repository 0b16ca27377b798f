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

#include "maiformer/eval/report_io.hpp"

#include <cstdio>
#include <fstream>

namespace maiformer::eval {

using nlohmann::json;

namespace {

json to_json(const VariateMetrics &m) {
    json out = json::object();
    for (std::size_t v = 0; v < data::kVariates; ++v) {
        out[data::kVariateNames[v]] = {
            {"mae", m.mae[v]}, {"rmse", m.rmse[v]}, {"mape", m.mape[v]}, {"mape_skipped", m.mape_skipped[v]}};
    }
    return out;
}

VariateMetrics variate_metrics_from_json(const json &j) {
    VariateMetrics m;
    for (std::size_t v = 0; v < data::kVariates; ++v) {
        const auto &e = j.at(data::kVariateNames[v]);
        m.mae[v] = e.at("mae").get<double>();
        m.rmse[v] = e.at("rmse").get<double>();
        m.mape[v] = e.at("mape").get<double>();
        m.mape_skipped[v] = e.at("mape_skipped").get<std::size_t>();
    }
    return m;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Degrees need more decimals than feet.
std::string cell(double v, std::size_t variate, bool percent) {
    char buf[32];
    std::snprintf(buf, sizeof buf, percent || variate == 2 ? "%10.4f" : "%10.6f", v);
    return buf;
}

std::string row(const std::string &model, const std::string &label, const VariateMetrics &m) {
    char head[64];
    std::snprintf(head, sizeof head, "%-16s %-8s", model.c_str(), label.c_str());
    std::string out = head;
    for (std::size_t v = 0; v < data::kVariates; ++v) out += cell(m.mae[v], v, false);
    out += " |";
    for (std::size_t v = 0; v < data::kVariates; ++v) out += cell(m.rmse[v], v, false);
    out += " |";
    for (std::size_t v = 0; v < data::kVariates; ++v) out += cell(m.mape[v], v, true);
    return out + "\n";
}

} // namespace

json to_json(const MetricsReport &r) {
    json horizons = json::array();
    for (const auto &h : r.horizons) horizons.push_back({{"horizon", h.horizon}, {"metrics", to_json(h.metrics)}});
    return {{"model", r.model},
            {"averaging", r.pooled ? "pooled" : "per_scene"},
            {"future_steps", r.future_steps},
            {"scenes", r.scenes},
            {"agent_counts", r.agent_counts},
            {"horizons", horizons},
            {"average", to_json(r.average)},
            {"all_steps", to_json(r.all_steps)}};
}

MetricsReport metrics_report_from_json(const json &j) {
    MetricsReport r;
    r.model = j.at("model").get<std::string>();
    r.pooled = j.at("averaging").get<std::string>() == "pooled";
    r.future_steps = j.at("future_steps").get<std::size_t>();
    r.scenes = j.at("scenes").get<std::size_t>();
    r.agent_counts = j.at("agent_counts").get<std::vector<std::size_t>>();
    for (const auto &h : j.at("horizons")) {
        r.horizons.push_back({h.at("horizon").get<std::size_t>(), variate_metrics_from_json(h.at("metrics"))});
    }
    r.average = variate_metrics_from_json(j.at("average"));
    r.all_steps = variate_metrics_from_json(j.at("all_steps"));
    return r;
}

std::string format_report(const std::vector<MetricsReport> &reports) {
    std::string out;
    char head[64];
    std::snprintf(head, sizeof head, "%-16s %-8s", "model", "horizon");
    out += head;
    for (const char *metric : {"MAE", "RMSE", "MAPE%"}) {
        for (const char *v : {"lat_deg", "lon_deg", "alt_ft"}) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%10s", (std::string(metric) + ":" + v).substr(0, 10).c_str());
            out += buf;
        }
        if (std::string(metric) != "MAPE%") out += " |";
    }
    out += "\n";
    for (const auto &r : reports) {
        for (const auto &h : r.horizons) out += row(r.model, std::to_string(h.horizon), h.metrics);
        out += row(r.model, "avg", r.average);
        out += row(r.model, "all", r.all_steps);
        std::size_t skipped = 0;
        for (auto s : r.all_steps.mape_skipped) skipped += s;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-16s scenes=%zu averaging=%s mape_skipped=%zu\n", r.model.c_str(), r.scenes,
                      r.pooled ? "pooled" : "per_scene", skipped);
        out += buf;
    }
    if (reports.size() >= 2) {
        VariateMetrics pi;
        for (const auto &e : pi_table(reports)) {
            auto &dst = e.metric == Metric::mae ? pi.mae : e.metric == Metric::rmse ? pi.rmse : pi.mape;
            dst[e.variate] = e.pi;
        }
        out += row("PI (%)", "avg", pi);
    }
    return out;
}

void write_reports(const std::filesystem::path &dir, const std::vector<MetricsReport> &reports) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.txt", format_report(reports));
    json all = json::array();
    for (const auto &r : reports) all.push_back(to_json(r));
    json doc{{"reports", all}};
    if (reports.size() >= 2) {
        json pis = json::array();
        for (const auto &e : pi_table(reports)) {
            pis.push_back({{"metric", to_string(e.metric)},
                           {"variate", data::kVariateNames[e.variate]},
                           {"best_model", e.best_model},
                           {"second_model", e.second_model},
                           {"best", e.best},
                           {"second", e.second},
                           {"pi_percent", e.pi}});
        }
        doc["pi"] = pis;
    }
    write_text(dir / "metrics.json", doc.dump(2) + "\n");
}

} // namespace maiformer::eval
