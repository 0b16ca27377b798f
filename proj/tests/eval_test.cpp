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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "maiformer/eval/attention_report.hpp"
#include "maiformer/eval/forecast.hpp"
#include "maiformer/eval/metrics.hpp"
#include "maiformer/eval/report_io.hpp"
#include "maiformer/model/weights.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace maiformer;
using namespace maiformer::eval;
using num::Array;
using num::Shape;

namespace {

// Random forecasts with targets bounded away from zero.
std::vector<Forecast> random_forecasts(std::mt19937_64 &rng, std::size_t scenes, std::size_t steps) {
    std::uniform_real_distribution<double> target(0.5, 3.0), noise(-0.4, 0.4), sign(0.0, 1.0);
    std::vector<Forecast> out;
    for (std::size_t u = 0; u < scenes; ++u) {
        const std::size_t n = 1 + rng() % 6;
        Forecast f;
        f.scene_id = u;
        f.prediction = Array<double>(Shape{n, steps, 3});
        f.target = Array<double>(Shape{n, steps, 3});
        for (std::size_t e = 0; e < f.target.size(); ++e) {
            f.target[e] = (sign(rng) < 0.5 ? -1.0 : 1.0) * target(rng);
            f.prediction[e] = f.target[e] + noise(rng);
        }
        for (std::size_t i = 0; i < n; ++i) f.agent_ids.push_back("X" + std::to_string(i));
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<oracle::SceneSeries> series(const std::vector<Forecast> &fs, bool prediction) {
    std::vector<oracle::SceneSeries> out;
    for (const auto &f : fs) {
        const auto &a = prediction ? f.prediction : f.target;
        const std::size_t n = a.extent(0), per = a.extent(1) * 3;
        oracle::SceneSeries s(n);
        for (std::size_t i = 0; i < n; ++i) s[i].assign(a.data() + i * per, a.data() + (i + 1) * per);
        out.push_back(std::move(s));
    }
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_SUITE("metrics") {
    TEST_CASE("perfect prediction gives zero everywhere") {
        std::mt19937_64 rng(1);
        auto fs = random_forecasts(rng, 4, 20);
        for (auto &f : fs) f.prediction = f.target;
        auto r = compute_metrics(fs);
        for (const auto &h : r.horizons)
            for (std::size_t v = 0; v < 3; ++v) {
                CHECK(h.metrics.mae[v] == 0.0);
                CHECK(h.metrics.rmse[v] == 0.0);
                CHECK(h.metrics.mape[v] == 0.0);
            }
    }

    TEST_CASE("single element by hand") {
        Forecast f;
        f.prediction = Array<double>(Shape{1, 1, 3}, 1.0);
        f.target = Array<double>(Shape{1, 1, 3}, 2.0);
        auto m = compute_step_metrics({f}, {1});
        for (std::size_t v = 0; v < 3; ++v) {
            CHECK(m.mae[v] == 1.0);
            CHECK(m.rmse[v] == 1.0);
            CHECK(m.mape[v] == 50.0);
        }
    }

    TEST_CASE("matches the literal triple sum on random batches") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 100; ++trial) {
            auto fs = random_forecasts(rng, 1 + rng() % 8, 20);
            const auto y = series(fs, false), y_hat = series(fs, true);
            auto r = compute_metrics(fs);
            for (const auto &h : r.horizons) {
                for (std::size_t v = 0; v < 3; ++v) {
                    const auto o = oracle::scene_errors(y, y_hat, v, {h.horizon - 1});
                    CHECK(rel(h.metrics.mae[v], o.mae) < 1e-9);
                    CHECK(rel(h.metrics.rmse[v], o.rmse) < 1e-9);
                    CHECK(rel(h.metrics.mape[v], o.mape) < 1e-9);
                    CHECK(h.metrics.rmse[v] >= h.metrics.mae[v]);
                }
            }
            std::vector<std::size_t> all(20);
            std::iota(all.begin(), all.end(), 0);
            for (std::size_t v = 0; v < 3; ++v) {
                const auto o = oracle::scene_errors(y, y_hat, v, all);
                CHECK(rel(r.all_steps.mae[v], o.mae) < 1e-9);
                CHECK(rel(r.all_steps.rmse[v], o.rmse) < 1e-9);
                CHECK(rel(r.all_steps.mape[v], o.mape) < 1e-9);
            }
        }
    }

    TEST_CASE("pooled mode weights every element alike") {
        std::mt19937_64 rng(3);
        auto fs = random_forecasts(rng, 5, 4);
        MetricOptions opt;
        opt.pooled = true;
        auto m = compute_step_metrics(fs, {1, 2, 3, 4}, opt);
        for (std::size_t v = 0; v < 3; ++v) {
            double a = 0, b = 0, c = 0, n = 0;
            for (const auto &f : fs)
                for (std::size_t e = v; e < f.target.size(); e += 3) {
                    const double d = f.target[e] - f.prediction[e];
                    a += std::abs(d);
                    b += d * d;
                    c += std::abs(d / f.target[e]);
                    n += 1;
                }
            CHECK(rel(m.mae[v], a / n) < 1e-12);
            CHECK(rel(m.rmse[v], std::sqrt(b / n)) < 1e-12);
            CHECK(rel(m.mape[v], 100 * c / n) < 1e-12);
        }
    }

    TEST_CASE("agent order within a scene does not matter") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            auto fs = random_forecasts(rng, 3, 20);
            auto shuffled = fs;
            for (auto &f : shuffled) {
                const std::size_t n = f.target.extent(0), per = 60;
                std::vector<std::size_t> perm(n);
                std::iota(perm.begin(), perm.end(), 0);
                std::shuffle(perm.begin(), perm.end(), rng);
                Forecast g = f;
                for (std::size_t i = 0; i < n; ++i) {
                    std::copy_n(f.prediction.data() + perm[i] * per, per, g.prediction.data() + i * per);
                    std::copy_n(f.target.data() + perm[i] * per, per, g.target.data() + i * per);
                }
                f = g;
            }
            auto a = compute_metrics(fs), b = compute_metrics(shuffled);
            for (std::size_t v = 0; v < 3; ++v) {
                CHECK(rel(a.average.mae[v], b.average.mae[v]) < 1e-12);
                CHECK(rel(a.average.rmse[v], b.average.rmse[v]) < 1e-12);
                CHECK(rel(a.average.mape[v], b.average.mape[v]) < 1e-12);
            }
        }
    }

    TEST_CASE("average row is the mean of the horizon rows") {
        std::mt19937_64 rng(5);
        auto r = compute_metrics(random_forecasts(rng, 6, 20));
        CHECK(r.horizons.size() == 5);
        CHECK(r.horizons.back().horizon == 20);
        for (std::size_t v = 0; v < 3; ++v) {
            double m = 0;
            for (const auto &h : r.horizons) m += h.metrics.rmse[v];
            CHECK(r.average.rmse[v] == doctest::Approx(m / 5).epsilon(1e-14));
        }
    }

    TEST_CASE("MAPE skips near-zero targets and reports them") {
        Forecast f;
        f.prediction = Array<double>(Shape{2, 1, 3}, 1.0);
        f.target = Array<double>(Shape{2, 1, 3}, 2.0);
        f.target(1, 0, 2) = 0.0;
        auto m = compute_step_metrics({f}, {1});
        CHECK(m.mape_skipped[2] == 1);
        CHECK(m.mape[2] == 50.0);
        CHECK(m.mae[2] == 1.0);
        f.target(0, 0, 2) = 1e-9;
        CHECK_THROWS_AS(compute_step_metrics({f}, {1}), MetricsError);
    }

    TEST_CASE("bad shapes and steps") {
        Forecast f;
        f.prediction = Array<double>(Shape{2, 3, 3}, 1.0);
        f.target = Array<double>(Shape{2, 4, 3}, 1.0);
        CHECK_THROWS_AS(compute_step_metrics({f}, {1}), MetricsError);
        f.target = f.prediction;
        CHECK_THROWS_AS(compute_step_metrics({f}, {4}), MetricsError);
        CHECK_THROWS_AS(compute_step_metrics({f}, {0}), MetricsError);
        CHECK_THROWS_AS(compute_step_metrics({}, {1}), MetricsError);
    }

    TEST_CASE("denormalized targets reproduce metrics on the originals") {
        const auto ds = testing::synthetic_dataset(40, 6);
        model::ModelConfig cfg;
        cfg.d_model = 8;
        cfg.layers = 1;
        cfg.heads = 2;
        cfg.ffn_hidden = 16;
        cfg.decoder_widths = {8};
        auto w = model::init_weights<double>(cfg, 7);
        auto fs = forecast_scenes(cfg, w, ds.prepared.split.test, ds.prepared.stats);
        auto round = fs;
        for (std::size_t u = 0; u < fs.size(); ++u) {
            const auto back = data::denormalize(ds.test[u], ds.prepared.stats);
            for (std::size_t i = 0; i < back.agent_count(); ++i)
                for (std::size_t e = 0; e < back.agents[i].future.size(); ++e)
                    round[u].target[i * back.agents[i].future.size() + e] = back.agents[i].future[e];
        }
        auto a = compute_metrics(fs), b = compute_metrics(round);
        for (std::size_t v = 0; v < 3; ++v) {
            CHECK(rel(a.average.mae[v], b.average.mae[v]) < 1e-6);
            CHECK(rel(a.average.rmse[v], b.average.rmse[v]) < 1e-6);
        }
    }
}

TEST_SUITE("performance improvement") {
    TEST_CASE("hand values") {
        CHECK(performance_improvement(3.0, 3.0) == 0.0);
        CHECK(performance_improvement(2.0, 4.0) == 50.0);
        CHECK_THROWS_AS(performance_improvement(1.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("latitude MAE reference columns give 22.46 percent") {
        const double ours = (0.0008 + 0.0012 + 0.0022 + 0.0028 + 0.0037) / 5;
        const double other = (0.0008 + 0.0024 + 0.0033 + 0.0034 + 0.0039) / 5;
        CHECK(std::abs(performance_improvement(ours, other) - 22.46) < 0.05);
    }

    TEST_CASE("scale invariance") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(0.01, 10.0);
        for (int i = 0; i < 200; ++i) {
            const double p1 = u(rng), p2 = u(rng), a = u(rng);
            CHECK(performance_improvement(a * p1, a * p2) == doctest::Approx(performance_improvement(p1, p2)));
        }
    }

    TEST_CASE("table ranks by horizon average") {
        std::mt19937_64 rng(9);
        auto fs = random_forecasts(rng, 5, 20);
        auto worse = fs;
        for (auto &f : worse)
            for (std::size_t e = 0; e < f.prediction.size(); ++e)
                f.prediction[e] = f.target[e] + 2.0 * (f.prediction[e] - f.target[e]);
        auto a = compute_metrics(fs, kDefaultHorizons, {}, "good");
        auto b = compute_metrics(worse, kDefaultHorizons, {}, "bad");
        auto table = pi_table({b, a});
        CHECK(table.size() == 9);
        for (const auto &e : table) {
            CHECK(e.best_model == "good");
            CHECK(e.second_model == "bad");
            CHECK(e.pi == doctest::Approx(100.0 * (e.second - e.best) / e.second));
        }
        CHECK(table[0].pi == doctest::Approx(50.0));
        CHECK_THROWS_AS(pi_table({a}), std::invalid_argument);
    }
}

TEST_SUITE("reports") {
    TEST_CASE("json round trip and text table") {
        std::mt19937_64 rng(10);
        auto a = compute_metrics(random_forecasts(rng, 3, 20), kDefaultHorizons, {}, "full");
        auto b = compute_metrics(random_forecasts(rng, 3, 20), kDefaultHorizons, {}, "mma-only");
        auto back = metrics_report_from_json(nlohmann::json::parse(to_json(a).dump()));
        CHECK(to_json(back) == to_json(a));
        const auto text = format_report({a, b});
        CHECK(text.find("PI (%)") != std::string::npos);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 8 + 1);
        const auto dir = testing::scratch_dir("reports");
        write_reports(dir, {a, b});
        CHECK(std::filesystem::exists(dir / "report.txt"));
        CHECK(std::filesystem::exists(dir / "metrics.json"));
    }
}

TEST_SUITE("attention report") {
    model::ModelConfig attn_config() {
        model::ModelConfig cfg;
        cfg.d_model = 8;
        cfg.layers = 2;
        cfg.heads = 2;
        cfg.ffn_hidden = 16;
        cfg.decoder_widths = {8};
        return cfg;
    }

    TEST_CASE("heat scaling") {
        const auto h = heat_scale({0.2, 0.5, 0.3});
        CHECK(h[0] == 0.0);
        CHECK(h[1] == 1.0);
        CHECK(h[2] == doctest::Approx(1.0 / 3.0));
        CHECK(heat_scale({1.0}) == std::vector<double>{1.0});
        CHECK(heat_scale({0.5, 0.5}) == std::vector<double>{1.0, 1.0});
    }

    TEST_CASE("scores sum to one, heads average, single agent scores one") {
        const auto ds = testing::synthetic_dataset(100, 11);
        const auto cfg = attn_config();
        auto w = model::init_weights<double>(cfg, 12);
        const data::Scene *multi = nullptr, *single = nullptr;
        for (const auto &s : ds.prepared.split.train) {
            if (s.agent_count() >= 3 && !multi) multi = &s;
            if (s.agent_count() == 1 && !single) single = &s;
        }
        REQUIRE(multi);
        REQUIRE(single);
        auto positions = [](const data::Scene &s) {
            std::vector<std::array<double, 3>> p;
            for (const auto &a : s.agents) {
                const std::size_t t = a.past.extent(0) - 1;
                p.push_back({a.past(t, 0), a.past(t, 1), a.past(t, 2)});
            }
            return p;
        };
        auto rec = record_scene_attention(cfg, w, *multi, ds.prepared.stats);
        auto rep = attention_report(rec, 0, 1, positions(*multi));
        CHECK(rep.query_id == multi->agents[1].flight_id);
        CHECK(rep.views.size() == 2 * 3);
        for (std::size_t l = 0; l < 2; ++l) {
            const auto &h0 = rep.views[l * 3], &h1 = rep.views[l * 3 + 1], &mean = rep.views[l * 3 + 2];
            CHECK_FALSE(mean.head.has_value());
            double total = 0;
            for (std::size_t k = 0; k < mean.scores.size(); ++k) {
                total += mean.scores[k].score;
                CHECK(mean.scores[k].score == doctest::Approx((h0.scores[k].score + h1.scores[k].score) / 2));
                CHECK(mean.scores[k].heat >= 0.0);
                CHECK(mean.scores[k].heat <= 1.0);
                CHECK(mean.scores[k].flight_id == multi->agents[k].flight_id);
            }
            CHECK(std::abs(total - 1.0) < 1e-6);
        }
        const auto svg = attention_svg(rep, rep.views.back());
        CHECK(svg.rfind("<svg", 0) == 0);
        std::size_t circles = 0;
        for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
        CHECK(circles == multi->agent_count());
        CHECK(svg.find("stroke=\"black\"") != std::string::npos);
        CHECK(to_json(rep)["views"].size() == 6);

        auto one = attention_report(record_scene_attention(cfg, w, *single, ds.prepared.stats), 0, 0, positions(*single));
        for (const auto &v : one.views) CHECK(v.scores.at(0).score == 1.0);

        CHECK_THROWS_AS(attention_report(rec, 0, multi->agent_count(), positions(*multi)), std::invalid_argument);
        auto ablated = model::mma_only(cfg);
        auto wa = model::init_weights<double>(ablated, 13);
        CHECK_THROWS_AS(attention_report(record_scene_attention(ablated, wa, *multi, ds.prepared.stats), 0, 0,
                                         positions(*multi)),
                        std::invalid_argument);
    }
}

TEST_SUITE("forecast") {
    TEST_CASE("future block does not influence predictions") {
        const auto ds = testing::synthetic_dataset(40, 14);
        model::ModelConfig cfg;
        cfg.d_model = 8;
        cfg.layers = 1;
        cfg.heads = 2;
        cfg.ffn_hidden = 16;
        cfg.decoder_widths = {8};
        auto w = model::init_weights<float>(cfg, 15);
        auto scenes = ds.prepared.split.val;
        auto before = forecast_scenes(cfg, w, scenes, ds.prepared.stats, 7);
        std::mt19937_64 rng(16);
        std::uniform_real_distribution<double> u(-1e4, 1e4);
        for (auto &s : scenes)
            for (auto &a : s.agents)
                for (auto &v : a.future.values()) v = u(rng);
        auto after = forecast_scenes(cfg, w, scenes, ds.prepared.stats, 7);
        REQUIRE(before.size() == scenes.size());
        for (std::size_t u2 = 0; u2 < before.size(); ++u2) {
            CHECK(before[u2].prediction == after[u2].prediction);
            CHECK(before[u2].prediction.extent(0) == scenes[u2].agent_count());
            CHECK(after[u2].target.values()[0] == scenes[u2].agents[0].future[0]);
        }
    }
}
