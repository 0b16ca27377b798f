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
#include <fstream>
#include <iterator>
#include <random>

#include "maiformer/model/checkpoint.hpp"
#include "maiformer/model/mask.hpp"
#include "maiformer/model/maiformer.hpp"
#include "maiformer/model/weights.hpp"
#include "maiformer/numerics/grad_check.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace maiformer::model;
using maiformer::num::Array;
using maiformer::num::Shape;
using maiformer::num::Var;
using maiformer::testing::perturb;
using maiformer::testing::random_array;
namespace oracle = maiformer::oracle;

namespace {

ModelConfig small_config(std::size_t d = 16, std::size_t heads = 2, std::size_t layers = 1) {
    ModelConfig c;
    c.max_agents = 6;
    c.past_steps = 5;
    c.future_steps = 4;
    c.d_model = d;
    c.layers = layers;
    c.heads = heads;
    c.ffn_hidden = 4 * d;
    c.decoder_widths = {12, 8};
    return c;
}

std::vector<double> vec(const Weights<double> &w, const std::string &name) {
    const auto &a = w.get(name).value();
    return std::vector<double>(a.values().begin(), a.values().end());
}

oracle::Mat mat(const Weights<double> &w, const std::string &name) {
    const auto &a = w.get(name).value();
    return oracle::Mat(a.extent(0), a.extent(1), std::vector<double>(a.values().begin(), a.values().end()));
}

oracle::Projections projections(const Weights<double> &w, const std::string &p) {
    return {mat(w, p + ".q.weight"), mat(w, p + ".k.weight"), mat(w, p + ".v.weight"), mat(w, p + ".out.weight"),
            vec(w, p + ".q.bias"),   vec(w, p + ".k.bias"),   vec(w, p + ".v.bias"),   vec(w, p + ".out.bias")};
}

oracle::Mat rows_of(const Array<double> &a, std::size_t first, std::size_t count) {
    const std::size_t w = a.extent(1);
    return oracle::Mat(count, w, std::vector<double>(a.data() + first * w, a.data() + (first + count) * w));
}

std::vector<std::uint8_t> all_valid(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

} // namespace

TEST_SUITE("tokenize") {
    TEST_CASE("three agents with three variates give nine tokens") {
        auto cfg = small_config();
        auto w = init_weights<double>(cfg, 1);
        Var<double> past(random_array<double>(Shape{1, 3, 5, 3}, 2));
        CHECK(tokenize_scene(cfg, w, past).shape() == Shape{9, 16});
    }

    TEST_CASE("zero scene yields the embedding bias in every token") {
        auto cfg = small_config();
        auto w = init_weights<double>(cfg, 1);
        perturb(w, 3);
        auto tok = tokenize_scene(cfg, w, Var<double>(Array<double>(Shape{2, 2, 5, 3})));
        const auto &bias = w.get("embed.bias").value();
        for (std::size_t r = 0; r < 12; ++r)
            for (std::size_t c = 0; c < 16; ++c) CHECK(tok.value()(r, c) == bias[c]);
    }

    TEST_CASE("identical agents give identical rows, order is agent-major") {
        auto cfg = small_config();
        auto w = init_weights<double>(cfg, 1);
        auto one = random_array<double>(Shape{1, 1, 5, 3}, 4);
        Array<double> two(Shape{1, 2, 5, 3});
        for (std::size_t e = 0; e < 15; ++e) two[e] = two[15 + e] = one[e];
        auto tok = tokenize_scene(cfg, w, Var<double>(two)).value();
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 16; ++c) CHECK(tok(r, c) == tok(3 + r, c));
        // Row f of agent 0 embeds the time series of variate f.
        const auto &we = w.get("embed.weight").value();
        const auto &be = w.get("embed.bias").value();
        for (std::size_t f = 0; f < 3; ++f) {
            double acc = be[0];
            for (std::size_t t = 0; t < 5; ++t) acc += one[t * 3 + f] * we(t, 0);
            CHECK(tok(f, 0) == doctest::Approx(acc).epsilon(1e-14));
        }
    }

    TEST_CASE("wrong block shape") {
        auto cfg = small_config();
        auto w = init_weights<double>(cfg, 1);
        CHECK_THROWS_AS(tokenize_scene(cfg, w, Var<double>(Array<double>(Shape{1, 2, 6, 3}))),
                        maiformer::num::ShapeError);
    }
}

TEST_SUITE("mask") {
    TEST_CASE("two agents, three variates") {
        auto m = build_mask<double>(2, 3);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) CHECK((m.additive(i, j) == 0.0) == (i / 3 == j / 3));
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                if (i / 3 != j / 3) CHECK(std::isinf(m.additive(i, j)));
    }

    TEST_CASE("single agent is all allowed") {
        auto m = build_mask<float>(1, 3);
        for (float v : m.additive.values()) CHECK(v == 0.0f);
    }

    TEST_CASE("random sizes match an exhaustive pair scan") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 1 + rng() % 7, f = 1 + rng() % 5;
            std::vector<std::uint8_t> valid(n);
            for (auto &v : valid) v = rng() % 4 != 0;
            auto m = build_mask<double>(n, f, valid);
            std::size_t allowed_rows = 0;
            for (std::size_t i = 0; i < n * f; ++i) {
                std::size_t row_allowed = 0;
                for (std::size_t j = 0; j < n * f; ++j) {
                    const bool expect = i / f == j / f && valid[i / f] && valid[j / f];
                    CHECK((m.additive(i, j) == 0.0) == expect);
                    row_allowed += expect;
                }
                if (valid[i / f]) {
                    CHECK(row_allowed == f);
                    ++allowed_rows;
                }
            }
        }
    }
}

TEST_SUITE("mma") {
    TEST_CASE("per-agent oracle for N = 1..6") {
        auto cfg = small_config(16, 4);
        auto w = init_weights<double>(cfg, 7);
        perturb(w, 8);
        std::mt19937_64 rng(9);
        for (std::size_t n = 1; n <= 6; ++n) {
            const auto tokens = random_array<double>(Shape{n * 3, 16}, rng(), 2.0);
            auto out = masked_multivariate_attention(cfg, w, 0, Var<double>(tokens), mma_mask<double>(all_valid(n), 1, n, 3), 1)
                           .value();
            for (std::size_t a = 0; a < n; ++a) {
                const auto x = oracle::layer_norm(rows_of(tokens, a * 3, 3), vec(w, "layers.0.mma_norm.gain"),
                                                  vec(w, "layers.0.mma_norm.offset"));
                auto ref = oracle::self_attention(x, projections(w, "layers.0.mma"), 4,
                                                  [](std::size_t, std::size_t) { return true; });
                for (std::size_t r = 0; r < 3; ++r)
                    for (std::size_t c = 0; c < 16; ++c) CHECK(std::abs(out(a * 3 + r, c) - ref.output.at(r, c)) < 1e-12);
            }
        }
    }

    TEST_CASE("agent output is bit-identical with or without other agents") {
        auto cfg = small_config(16, 2);
        auto w = init_weights<double>(cfg, 7);
        const auto tokens = random_array<double>(Shape{12, 16}, 10);
        auto all = masked_multivariate_attention(cfg, w, 0, Var<double>(tokens), mma_mask<double>(all_valid(4), 1, 4, 3), 1)
                       .value();
        auto alone = masked_multivariate_attention(cfg, w, 0, Var<double>(Array<double>(Shape{3, 16}, std::vector<double>(tokens.data() + 96, tokens.data() + 144))),
                                                   mma_mask<double>(all_valid(1), 1, 1, 3), 1)
                         .value();
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 16; ++c) CHECK(all(6 + r, c) == alone(r, c));
    }

    TEST_CASE("cross-agent weights are exactly zero and residual flag adds the input") {
        auto cfg = small_config(16, 2);
        auto w = init_weights<double>(cfg, 7);
        const auto tokens = random_array<double>(Shape{9, 16}, 11);
        Array<double> att;
        auto plain = masked_multivariate_attention(cfg, w, 0, Var<double>(tokens), mma_mask<double>(all_valid(3), 1, 3, 3), 1,
                                                   &att)
                         .value();
        for (std::size_t h = 0; h < 2; ++h)
            for (std::size_t i = 0; i < 9; ++i)
                for (std::size_t j = 0; j < 9; ++j)
                    if (i / 3 != j / 3) CHECK(att[(h * 9 + i) * 9 + j] == 0.0);
        cfg.mma_residual = true;
        auto res = masked_multivariate_attention(cfg, w, 0, Var<double>(tokens), mma_mask<double>(all_valid(3), 1, 3, 3), 1)
                       .value();
        for (std::size_t e = 0; e < res.size(); ++e) CHECK(res[e] == doctest::Approx(plain[e] + tokens[e]).epsilon(1e-14));
    }

    TEST_CASE("gradient isolation between agents") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 12);
        Var<double> tokens(random_array<double>(Shape{12, 8}, 13), true);
        for (std::size_t i = 0; i < 4; ++i) {
            tokens.zero_grad();
            auto out = masked_multivariate_attention(cfg, w, 0, tokens, mma_mask<double>(all_valid(4), 1, 4, 3), 1);
            Array<double> seed(Shape{12, 8});
            for (std::size_t r = i * 3; r < i * 3 + 3; ++r)
                for (std::size_t c = 0; c < 8; ++c) seed(r, c) = 1.0 + 0.1 * static_cast<double>(c);
            maiformer::num::backward(out, seed);
            for (std::size_t r = 0; r < 12; ++r) {
                double mag = 0;
                for (std::size_t c = 0; c < 8; ++c) mag += std::abs(tokens.grad()(r, c));
                if (r / 3 == i) {
                    CHECK(mag > 0.0);
                } else {
                    CHECK(mag == 0.0);
                }
            }
        }
    }
}

TEST_SUITE("agent_attention") {
    TEST_CASE("single agent: weight one, value path plus residual") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 14);
        perturb(w, 15);
        const auto tok = random_array<double>(Shape{1, 24}, 16);
        Array<double> att;
        auto out = agent_attention(cfg, w, 0, Var<double>(tok), agent_mask<double>(all_valid(1), 1, 1), 1, &att).value();
        CHECK(att.size() == 2);
        CHECK(att[0] == 1.0);
        CHECK(att[1] == 1.0);
        const auto x = oracle::layer_norm(oracle::Mat(1, 24, std::vector<double>(tok.values().begin(), tok.values().end())),
                                          vec(w, "layers.0.aa_norm.gain"), vec(w, "layers.0.aa_norm.offset"));
        const auto v = oracle::affine(x, mat(w, "layers.0.aa.v.weight"), vec(w, "layers.0.aa.v.bias"));
        const auto o = oracle::affine(v, mat(w, "layers.0.aa.out.weight"), vec(w, "layers.0.aa.out.bias"));
        for (std::size_t c = 0; c < 24; ++c) CHECK(std::abs(out[c] - (o.at(0, c) + tok[c])) < 1e-12);
    }

    TEST_CASE("identical agent tokens split attention evenly") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 14);
        auto one = random_array<double>(Shape{1, 24}, 17);
        Array<double> two(Shape{2, 24});
        for (std::size_t e = 0; e < 24; ++e) two[e] = two[24 + e] = one[e];
        Array<double> att;
        agent_attention(cfg, w, 0, Var<double>(two), agent_mask<double>(all_valid(2), 1, 2), 1, &att);
        for (double v : att.values()) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("N = 4 weights and output match the brute-force oracle") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 18);
        perturb(w, 19);
        const auto tok = random_array<double>(Shape{4, 24}, 20, 2.0);
        Array<double> att;
        auto out = agent_attention(cfg, w, 0, Var<double>(tok), agent_mask<double>(all_valid(4), 1, 4), 1, &att).value();
        const auto x = oracle::layer_norm(rows_of(tok, 0, 4), vec(w, "layers.0.aa_norm.gain"),
                                          vec(w, "layers.0.aa_norm.offset"));
        auto ref = oracle::self_attention(x, projections(w, "layers.0.aa"), 2,
                                          [](std::size_t, std::size_t) { return true; });
        for (std::size_t h = 0; h < 2; ++h)
            for (std::size_t e = 0; e < 16; ++e) CHECK(std::abs(att[h * 16 + e] - ref.weights[h][e]) < 1e-12);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 24; ++c) CHECK(std::abs(out(r, c) - ref.output.at(r, c) - tok(r, c)) < 1e-12);
    }

    TEST_CASE("padded agents are never attended to") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 21);
        const auto tok = random_array<double>(Shape{4, 24}, 22);
        Array<double> att;
        agent_attention(cfg, w, 0, Var<double>(tok), agent_mask<double>({1, 0, 1, 0}, 1, 4), 1, &att);
        for (std::size_t h = 0; h < 2; ++h)
            for (std::size_t i : {0, 2}) {
                CHECK(att[(h * 4 + i) * 4 + 1] == 0.0);
                CHECK(att[(h * 4 + i) * 4 + 3] == 0.0);
                CHECK(std::abs(att[(h * 4 + i) * 4] + att[(h * 4 + i) * 4 + 2] - 1.0) < 1e-12);
            }
        CHECK_THROWS_AS(agent_mask<double>({0, 0}, 1, 2), std::invalid_argument);
    }
}

TEST_SUITE("ffn") {
    TEST_CASE("zero weights leave the input unchanged") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 23);
        for (const char *n : {"layers.0.ffn.fc1.weight", "layers.0.ffn.fc1.bias", "layers.0.ffn.fc2.weight",
                              "layers.0.ffn.fc2.bias"})
            w.get(n).mutable_value().fill(0.0);
        const auto x = random_array<double>(Shape{5, 8}, 24);
        CHECK(ffn(cfg, w, 0, Var<double>(x)).value() == x);
    }

    TEST_CASE("identical tokens give identical outputs; single token matches the oracle") {
        auto cfg = small_config(8, 2);
        auto w = init_weights<double>(cfg, 25);
        perturb(w, 26);
        auto one = random_array<double>(Shape{1, 8}, 27);
        Array<double> two(Shape{2, 8});
        for (std::size_t e = 0; e < 8; ++e) two[e] = two[8 + e] = one[e];
        auto out = ffn(cfg, w, 0, Var<double>(two)).value();
        for (std::size_t c = 0; c < 8; ++c) CHECK(out(0, c) == out(1, c));
        const auto x = oracle::layer_norm(oracle::Mat(1, 8, std::vector<double>(one.values().begin(), one.values().end())),
                                          vec(w, "layers.0.ffn_norm.gain"), vec(w, "layers.0.ffn_norm.offset"));
        auto h = oracle::affine(x, mat(w, "layers.0.ffn.fc1.weight"), vec(w, "layers.0.ffn.fc1.bias"));
        for (auto &v : h.v) v = oracle::gelu(v);
        auto y = oracle::affine(h, mat(w, "layers.0.ffn.fc2.weight"), vec(w, "layers.0.ffn.fc2.bias"));
        for (std::size_t c = 0; c < 8; ++c) CHECK(std::abs(out(0, c) - y.at(0, c) - one[c]) < 1e-6);
    }
}

TEST_SUITE("forward") {
    TEST_CASE("output shape for every N") {
        auto cfg = small_config(8, 2, 2);
        auto w = init_weights<float>(cfg, 28);
        for (std::size_t n = 1; n <= cfg.max_agents; ++n) {
            auto pred = forward(cfg, w, Var<float>(random_array<float>(Shape{2, n, 5, 3}, n)), all_valid(2 * n));
            CHECK(pred.output.shape() == Shape{2, n, 4, 3});
        }
        CHECK_THROWS_AS(forward(cfg, w, Var<float>(Array<float>(Shape{1, 7, 5, 3})), all_valid(7)),
                        std::invalid_argument);
    }

    TEST_CASE("permuting agents permutes predictions") {
        auto cfg = small_config(16, 4, 2);
        auto w = init_weights<double>(cfg, 29);
        perturb(w, 30);
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 2 + rng() % 5;
            const auto past = random_array<double>(Shape{1, n, 5, 3}, rng());
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            Array<double> permuted(past.shape());
            for (std::size_t a = 0; a < n; ++a)
                std::copy_n(past.data() + perm[a] * 15, 15, permuted.data() + a * 15);
            auto y = forward(cfg, w, Var<double>(past), all_valid(n)).output.value();
            auto yp = forward(cfg, w, Var<double>(permuted), all_valid(n)).output.value();
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t e = 0; e < 12; ++e) CHECK(std::abs(yp[a * 12 + e] - y[perm[a] * 12 + e]) < 1e-10);
        }
    }

    TEST_CASE("padding does not change real agents") {
        auto cfg = small_config(16, 2, 2);
        auto w = init_weights<float>(cfg, 32);
        const auto past = random_array<float>(Shape{1, 2, 5, 3}, 33);
        Array<float> padded(Shape{1, 5, 5, 3});
        std::copy_n(past.data(), 30, padded.data());
        auto alone = forward(cfg, w, Var<float>(past), all_valid(2)).output.value();
        auto with = forward(cfg, w, Var<float>(padded), {1, 1, 0, 0, 0}).output.value();
        for (std::size_t e = 0; e < 24; ++e) CHECK(std::abs(alone[e] - with[e]) <= 1e-5);
    }

    TEST_CASE("deterministic, and heads matter") {
        auto cfg = small_config(16, 4, 2);
        auto w = init_weights<float>(cfg, 34);
        Var<float> past(random_array<float>(Shape{2, 3, 5, 3}, 35));
        auto a = forward(cfg, w, past, all_valid(6)).output.value();
        auto b = forward(cfg, w, past, all_valid(6)).output.value();
        CHECK(a == b);
        auto cfg1 = cfg;
        cfg1.heads = 1;
        auto c = forward(cfg1, w, past, all_valid(6)).output.value();
        double diff = 0;
        for (std::size_t e = 0; e < a.size(); ++e) diff = std::max(diff, double(std::abs(a[e] - c[e])));
        CHECK(diff > 1e-6);
    }

    TEST_CASE("MMA-only ablation has no agent attention weights and ignores other agents") {
        auto cfg = mma_only(small_config(8, 2, 2));
        auto w = init_weights<double>(cfg, 36);
        for (const auto &p : w.items()) CHECK(p.name.find(".aa") == std::string::npos);
        const auto past = random_array<double>(Shape{1, 3, 5, 3}, 37);
        Array<double> first(Shape{1, 1, 5, 3}, std::vector<double>(past.data(), past.data() + 15));
        auto all = forward(cfg, w, Var<double>(past), all_valid(3), true);
        auto alone = forward(cfg, w, Var<double>(first), all_valid(1)).output.value();
        for (std::size_t e = 0; e < 12; ++e) CHECK(all.output.value()[e] == alone[e]);
        CHECK(all.record.aa.empty());
        CHECK_THROWS_AS(extract_attention(all.record, 0, std::nullopt, 0, 0), std::invalid_argument);
    }

    TEST_CASE("one-layer model gradient check") {
        ModelConfig cfg;
        cfg.max_agents = 2;
        cfg.past_steps = 4;
        cfg.future_steps = 4;
        cfg.d_model = 8;
        cfg.heads = 2;
        cfg.layers = 1;
        cfg.ffn_hidden = 32;
        cfg.decoder_widths = {8};
        auto w = init_weights<double>(cfg, 38);
        perturb(w, 39);
        const auto past = random_array<double>(Shape{1, 2, 4, 3}, 40);
        const auto target = random_array<double>(Shape{1, 2, 4, 3}, 41);
        const std::vector<std::uint8_t> valid{1, 1};
        auto report = maiformer::num::grad_check(
            [&] { return maiformer::num::masked_mse(forward(cfg, w, Var<double>(past), valid).output, target, valid); },
            w);
        for (const auto &e : report.entries) INFO(e.name << " " << e.relative_error);
        for (const auto &e : report.entries) CHECK_MESSAGE(e.relative_error < 1e-4, e.name);
        CHECK(report.max_relative_error < 1e-4);
    }
}

TEST_SUITE("attention record") {
    TEST_CASE("rows sum to one, padding gets zero, heads average") {
        auto cfg = small_config(8, 2, 2);
        auto w = init_weights<double>(cfg, 42);
        auto pred = forward(cfg, w, Var<double>(random_array<double>(Shape{2, 4, 5, 3}, 43)),
                            {1, 1, 1, 0, 1, 0, 0, 0}, true);
        const auto &rec = pred.record;
        CHECK(rec.layers() == 2);
        for (std::size_t l = 0; l < 2; ++l) {
            auto avg = extract_attention(rec, l, std::nullopt, 0, 1);
            auto h0 = extract_attention(rec, l, 0, 0, 1);
            auto h1 = extract_attention(rec, l, 1, 0, 1);
            CHECK(std::abs(std::accumulate(avg.begin(), avg.end(), 0.0) - 1.0) < 1e-6);
            CHECK(avg[3] == 0.0);
            for (std::size_t j = 0; j < 4; ++j) CHECK(avg[j] == doctest::Approx((h0[j] + h1[j]) / 2));
            auto single = extract_attention(rec, l, std::nullopt, 1, 0);
            CHECK(single[0] == 1.0);
            auto block = mma_block(rec, l, 0, 0, 2);
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(std::abs(block(i, 0) + block(i, 1) + block(i, 2) - 1.0) < 1e-12);
        }
        CHECK_THROWS_AS(extract_attention(rec, 2, std::nullopt, 0, 0), std::out_of_range);
        CHECK_THROWS_AS(extract_attention(rec, 0, std::nullopt, 0, 3), std::invalid_argument);
        CHECK_THROWS_AS(extract_attention(rec, 0, std::nullopt, 0, 4), std::out_of_range);
    }

    TEST_CASE("two identical agents split evenly") {
        auto cfg = small_config(8, 2, 1);
        auto w = init_weights<double>(cfg, 44);
        auto one = random_array<double>(Shape{1, 1, 5, 3}, 45);
        Array<double> two(Shape{1, 2, 5, 3});
        for (std::size_t e = 0; e < 15; ++e) two[e] = two[15 + e] = one[e];
        auto rec = forward(cfg, w, Var<double>(two), all_valid(2), true).record;
        auto s = extract_attention(rec, 0, std::nullopt, 0, 0);
        CHECK(s[0] == doctest::Approx(0.5));
        CHECK(s[1] == doctest::Approx(0.5));
    }
}

TEST_SUITE("weights") {
    TEST_CASE("layout of the default configuration") {
        ModelConfig cfg;
        auto layout = weight_layout(cfg);
        // embed 2 + per layer (LN 2 + 8 + LN 2 + 8 + LN 2 + 4) + decoder (4 + 1) * 2
        CHECK(layout.size() == 2 + 3 * 26 + 10);
        std::size_t total = 0;
        for (const auto &s : layout) total += maiformer::num::element_count(s.shape);
        const std::size_t per_layer = 2 * 256 + 4 * (256 * 256 + 256) + 2 * 768 + 4 * (768 * 768 + 768) + 2 * 256 +
                                      (256 * 1024 + 1024) + (1024 * 256 + 256);
        const std::size_t decoder = (256 * 256 + 256) + (256 * 128 + 128) + (128 * 64 + 64) + (64 * 32 + 32) + (32 * 20 + 20);
        CHECK(total == (20 * 256 + 256) + 3 * per_layer + decoder);
    }

    TEST_CASE("initialization bounds") {
        auto cfg = small_config();
        auto w = init_weights<double>(cfg, 46);
        for (const auto &p : w.items()) {
            const auto &a = p.var.value();
            if (p.name.ends_with(".weight")) {
                const double bound = 1.0 / std::sqrt(double(a.extent(0)));
                for (double v : a.values()) CHECK(std::abs(v) <= bound);
            } else if (p.name.ends_with(".gain")) {
                for (double v : a.values()) CHECK(v == 1.0);
            } else {
                for (double v : a.values()) CHECK(v == 0.0);
            }
        }
    }
}

TEST_SUITE("checkpoint") {
    TEST_CASE("round trip is bit-exact and forward matches") {
        auto cfg = small_config(8, 2, 2);
        Checkpoint<float> ck;
        ck.config = cfg;
        ck.weights = init_weights<float>(cfg, 47);
        perturb(ck.weights, 48);
        ck.norm_stats = maiformer::data::NormStats{{37, 126, 0}, {38, 127, 12000}};
        auto opt = maiformer::num::AdamState<float>::for_parameters(ck.weights, 3e-4);
        opt.step = 17;
        for (auto &m : opt.first_moment) m.fill(0.125f);
        ck.optimizer = opt;
        ck.meta = {{"epoch", 4}, {"best_val_loss", 0.1234567890123}};
        const auto dir = maiformer::testing::scratch_dir("ckpt");
        save_checkpoint(dir / "a.ckpt", ck);
        auto back = load_checkpoint<float>(dir / "a.ckpt");
        CHECK(back.config == cfg);
        CHECK(back.norm_stats == ck.norm_stats);
        CHECK(back.meta == ck.meta);
        REQUIRE(back.optimizer.has_value());
        CHECK(back.optimizer->step == 17);
        CHECK(back.optimizer->learning_rate == 3e-4);
        CHECK(back.optimizer->first_moment == opt.first_moment);
        for (std::size_t i = 0; i < ck.weights.size(); ++i)
            CHECK(back.weights.items()[i].var.value() == ck.weights.items()[i].var.value());
        Var<float> past(random_array<float>(Shape{1, 3, 5, 3}, 49));
        CHECK(forward(cfg, ck.weights, past, all_valid(3)).output.value() ==
              forward(cfg, back.weights, past, all_valid(3)).output.value());
        save_checkpoint(dir / "b.ckpt", back);
        std::ifstream fa(dir / "a.ckpt", std::ios::binary), fb(dir / "b.ckpt", std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(sa == sb);
    }

    TEST_CASE("version, corruption and precision are typed errors") {
        auto cfg = small_config(8, 2, 1);
        Checkpoint<double> ck;
        ck.config = cfg;
        ck.weights = init_weights<double>(cfg, 50);
        const auto dir = maiformer::testing::scratch_dir("ckpt_err");
        save_checkpoint(dir / "c.ckpt", ck);
        std::string bytes;
        {
            std::ifstream in(dir / "c.ckpt", std::ios::binary);
            bytes.assign(std::istreambuf_iterator<char>(in), {});
        }
        auto write = [&](const std::string &name, const std::string &content) {
            std::ofstream out(dir / name, std::ios::binary);
            out << content;
        };
        auto kind_of = [&](const std::string &name) {
            try {
                load_checkpoint<double>(dir / name);
            } catch (const CheckpointError &e) {
                return static_cast<int>(e.kind());
            }
            return -1;
        };
        std::string v2 = bytes;
        v2[8] = 2;
        write("v2.ckpt", v2);
        CHECK(kind_of("v2.ckpt") == static_cast<int>(CheckpointError::Kind::version_mismatch));
        std::string flipped = bytes;
        flipped[bytes.size() / 2] ^= 0x10;
        write("flip.ckpt", flipped);
        CHECK(kind_of("flip.ckpt") == static_cast<int>(CheckpointError::Kind::corrupt));
        write("short.ckpt", bytes.substr(0, bytes.size() - 20));
        CHECK(kind_of("short.ckpt") == static_cast<int>(CheckpointError::Kind::corrupt));
        CHECK_THROWS_AS(load_checkpoint<float>(dir / "c.ckpt"), CheckpointError);
    }
}
