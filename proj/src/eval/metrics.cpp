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

#include "maiformer/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maiformer::eval {

namespace {

constexpr std::size_t F = data::kVariates;

void check_forecast(const Forecast &f, std::size_t steps) {
    const auto &p = f.prediction.shape();
    if (p.size() != 3 || p[2] != F || f.target.shape() != p) {
        throw MetricsError("scene " + std::to_string(f.scene_id) + ": prediction " +
                           num::shape_string(f.prediction.shape()) + " vs target " +
                           num::shape_string(f.target.shape()));
    }
    if (p[0] == 0) throw MetricsError("scene " + std::to_string(f.scene_id) + " has no agents");
    if (p[1] != steps) throw MetricsError("scene " + std::to_string(f.scene_id) + ": inconsistent horizon");
}

// Running sums for one group of elements (a scene, or everything when pooled).
struct Sums {
    std::array<double, F> abs{}, sq{}, pct{};
    std::array<std::size_t, F> count{}, pct_count{}, skipped{};

    void add(std::size_t v, double y, double y_hat, double eps) {
        const double d = y - y_hat;
        abs[v] += std::abs(d);
        sq[v] += d * d;
        ++count[v];
        if (std::abs(y) < eps) {
            ++skipped[v];
        } else {
            pct[v] += std::abs(d / y);
            ++pct_count[v];
        }
    }
};

} // namespace

VariateMetrics compute_step_metrics(const std::vector<Forecast> &forecasts, const std::vector<std::size_t> &steps,
                                    const MetricOptions &options) {
    if (forecasts.empty()) throw MetricsError("metrics: no scenes");
    if (steps.empty()) throw MetricsError("metrics: no steps selected");
    const std::size_t s_total = forecasts.front().prediction.shape().size() == 3 ? forecasts.front().prediction.extent(1) : 0;
    for (std::size_t j : steps) {
        if (j == 0 || j > s_total) {
            throw MetricsError("metrics: step " + std::to_string(j) + " outside 1.." + std::to_string(s_total));
        }
    }

    // Per-scene means of |d|, d^2 and |d/y| are averaged over scenes; the
    // pooled variant folds every element into a single group.
    std::array<double, F> mae{}, mse{}, mape{};
    std::array<std::size_t, F> groups{}, mape_groups{}, skipped{};
    Sums pooled;
    for (const auto &f : forecasts) {
        check_forecast(f, s_total);
        Sums local;
        Sums &acc = options.pooled ? pooled : local;
        const std::size_t n = f.prediction.extent(0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j : steps)
                for (std::size_t v = 0; v < F; ++v)
                    acc.add(v, f.target(i, j - 1, v), f.prediction(i, j - 1, v), options.mape_epsilon);
        if (options.pooled) continue;
        for (std::size_t v = 0; v < F; ++v) {
            const double c = static_cast<double>(local.count[v]);
            mae[v] += local.abs[v] / c;
            mse[v] += local.sq[v] / c;
            ++groups[v];
            skipped[v] += local.skipped[v];
            if (local.pct_count[v] > 0) {
                mape[v] += local.pct[v] / static_cast<double>(local.pct_count[v]);
                ++mape_groups[v];
            }
        }
    }
    if (options.pooled) {
        for (std::size_t v = 0; v < F; ++v) {
            const double c = static_cast<double>(pooled.count[v]);
            mae[v] = pooled.abs[v] / c;
            mse[v] = pooled.sq[v] / c;
            groups[v] = 1;
            skipped[v] = pooled.skipped[v];
            mape[v] = pooled.pct_count[v] > 0 ? pooled.pct[v] / static_cast<double>(pooled.pct_count[v]) : 0.0;
            mape_groups[v] = pooled.pct_count[v] > 0 ? 1 : 0;
        }
    }

    VariateMetrics out;
    for (std::size_t v = 0; v < F; ++v) {
        if (mape_groups[v] == 0) {
            throw MetricsError("metrics: every element of " + std::string(data::kVariateNames[v]) +
                               " is below the MAPE threshold");
        }
        out.mae[v] = mae[v] / static_cast<double>(groups[v]);
        out.rmse[v] = std::sqrt(mse[v] / static_cast<double>(groups[v]));
        out.mape[v] = 100.0 * mape[v] / static_cast<double>(mape_groups[v]);
        out.mape_skipped[v] = skipped[v];
    }
    return out;
}

MetricsReport compute_metrics(const std::vector<Forecast> &forecasts, const std::vector<std::size_t> &horizons,
                              const MetricOptions &options, const std::string &model) {
    if (forecasts.empty()) throw MetricsError("metrics: no scenes");
    if (horizons.empty()) throw MetricsError("metrics: no horizons");
    MetricsReport r;
    r.model = model;
    r.pooled = options.pooled;
    r.future_steps = forecasts.front().prediction.shape().size() == 3 ? forecasts.front().prediction.extent(1) : 0;
    r.scenes = forecasts.size();
    for (const auto &f : forecasts) r.agent_counts.push_back(f.prediction.shape().empty() ? 0 : f.prediction.extent(0));

    for (std::size_t h : horizons) r.horizons.push_back({h, compute_step_metrics(forecasts, {h}, options)});
    std::vector<std::size_t> all(r.future_steps);
    std::iota(all.begin(), all.end(), 1);
    r.all_steps = compute_step_metrics(forecasts, all, options);

    const double k = static_cast<double>(r.horizons.size());
    for (const auto &row : r.horizons) {
        for (std::size_t v = 0; v < F; ++v) {
            r.average.mae[v] += row.metrics.mae[v] / k;
            r.average.rmse[v] += row.metrics.rmse[v] / k;
            r.average.mape[v] += row.metrics.mape[v] / k;
            r.average.mape_skipped[v] += row.metrics.mape_skipped[v];
        }
    }
    return r;
}

double performance_improvement(double p1, double p2) {
    if (!(p2 > 0.0)) throw std::invalid_argument("performance_improvement: reference value must be positive");
    return 100.0 * std::abs(p2 - p1) / p2;
}

std::string to_string(Metric m) {
    switch (m) {
    case Metric::mae: return "MAE";
    case Metric::rmse: return "RMSE";
    case Metric::mape: return "MAPE";
    }
    return "?";
}

std::vector<PiEntry> pi_table(const std::vector<MetricsReport> &reports) {
    if (reports.size() < 2) throw std::invalid_argument("pi_table: need at least two models");
    std::vector<PiEntry> out;
    for (Metric m : {Metric::mae, Metric::rmse, Metric::mape}) {
        for (std::size_t v = 0; v < F; ++v) {
            auto value = [&](const MetricsReport &r) {
                switch (m) {
                case Metric::mae: return r.average.mae[v];
                case Metric::rmse: return r.average.rmse[v];
                case Metric::mape: return r.average.mape[v];
                }
                return 0.0;
            };
            std::vector<std::size_t> idx(reports.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return value(reports[a]) < value(reports[b]); });
            PiEntry e;
            e.metric = m;
            e.variate = v;
            e.best_model = reports[idx[0]].model;
            e.second_model = reports[idx[1]].model;
            e.best = value(reports[idx[0]]);
            e.second = value(reports[idx[1]]);
            e.pi = e.second > 0.0 ? performance_improvement(e.best, e.second) : 0.0;
            out.push_back(e);
        }
    }
    return out;
}

} // namespace maiformer::eval
