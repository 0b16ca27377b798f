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
#include <stdexcept>
#include <string>
#include <vector>

#include "maiformer/data/raw_track.hpp"
#include "maiformer/numerics/array.hpp"

namespace maiformer::eval {

inline const std::vector<std::size_t> kDefaultHorizons{1, 5, 10, 15, 20};
inline constexpr double kMapeEpsilon = 1e-6; // |Y| below this (physical units) is skipped for MAPE

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One scene's forecast for its real agents, physical units.
struct Forecast {
    std::uint64_t scene_id = 0;
    std::vector<std::string> agent_ids;
    num::Array<double> prediction; // [N, S, 3]
    num::Array<double> target;     // [N, S, 3]
};

struct VariateMetrics {
    std::array<double, data::kVariates> mae{};
    std::array<double, data::kVariates> rmse{};
    std::array<double, data::kVariates> mape{}; // percent
    std::array<std::size_t, data::kVariates> mape_skipped{};
};

struct HorizonMetrics {
    std::size_t horizon = 0; // 1-based future step
    VariateMetrics metrics;
};

struct MetricsReport {
    std::string model;
    bool pooled = false;
    std::size_t future_steps = 0;
    std::vector<HorizonMetrics> horizons;
    VariateMetrics average;   // mean of the per-horizon rows
    VariateMetrics all_steps; // every step 1..S at once
    std::size_t scenes = 0;
    std::vector<std::size_t> agent_counts; // per scene
};

struct MetricOptions {
    // Per scene over agents and steps, then over scenes; pooled treats every
    // element alike instead.
    bool pooled = false;
    double mape_epsilon = kMapeEpsilon;
};

/// Errors restricted to the given 1-based steps. Throws MetricsError on
/// shape mismatch, an empty set, or a variate whose MAPE skips every element.
VariateMetrics compute_step_metrics(const std::vector<Forecast> &forecasts, const std::vector<std::size_t> &steps,
                                    const MetricOptions &options = {});

MetricsReport compute_metrics(const std::vector<Forecast> &forecasts,
                              const std::vector<std::size_t> &horizons = kDefaultHorizons,
                              const MetricOptions &options = {}, const std::string &model = "model");

/// 100 * |p2 - p1| / p2. Throws std::invalid_argument unless p2 > 0.
double performance_improvement(double p1, double p2);

enum class Metric { mae, rmse, mape };
std::string to_string(Metric m);

struct PiEntry {
    Metric metric = Metric::mae;
    std::size_t variate = 0;
    std::string best_model, second_model;
    double best = 0.0, second = 0.0; // horizon averages
    double pi = 0.0;
};

/// Ranks models by horizon average for every metric and variate and reports
/// the improvement of the best over the runner-up. Needs two or more reports.
std::vector<PiEntry> pi_table(const std::vector<MetricsReport> &reports);

} // namespace maiformer::eval
