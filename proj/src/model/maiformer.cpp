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


#include "maiformer/model/maiformer.hpp"

#include <stdexcept>
#include <string>

#include "maiformer/model/mask.hpp"

namespace maiformer::model {

using num::Array;
using num::Shape;
using num::Var;

namespace {

template <typename T>
const Var<T> &w(const Weights<T> &weights, const std::string &name) {
    return weights.get(name);
}

template <typename T>
Var<T> affine(const Weights<T> &weights, const std::string &prefix, const Var<T> &x) {
    return num::linear(x, w(weights, prefix + ".weight"), w(weights, prefix + ".bias"));
}

template <typename T>
Var<T> norm(const Weights<T> &weights, const std::string &prefix, const Var<T> &x) {
    return num::layer_norm(x, w(weights, prefix + ".gain"), w(weights, prefix + ".offset"));
}

// LN -> Q/K/V projections -> masked multi-head attention -> output projection.
template <typename T>
Var<T> attention_block(const Weights<T> &weights, const std::string &prefix, const std::string &norm_prefix,
                       const Var<T> &x, const num::kernels::AttentionDims &dims, const num::AttentionMask<T> &mask,
                       Array<T> *attention) {
    const Var<T> h = norm(weights, norm_prefix, x);
    const Var<T> q = affine(weights, prefix + ".q", h);
    const Var<T> k = affine(weights, prefix + ".k", h);
    const Var<T> v = affine(weights, prefix + ".v", h);
    auto att = num::multi_head_attention(q, k, v, dims, mask);
    if (attention != nullptr) *attention = std::move(att.weights);
    return affine(weights, prefix + ".out", att.output);
}

std::string layer_prefix(std::size_t layer) { return "layers." + std::to_string(layer); }

void check_layer(const ModelConfig &config, std::size_t layer) {
    if (layer >= config.layers) throw std::out_of_range("layer " + std::to_string(layer) + " out of range");
}

} // namespace

template <typename T>
Var<T> tokenize_scene(const ModelConfig &config, const Weights<T> &weights, const Var<T> &past) {
    const Shape &s = past.shape();
    if (s.size() != 4 || s[2] != config.past_steps || s[3] != config.variates || s[0] == 0 || s[1] == 0) {
        throw num::ShapeError("tokenize_scene: past block " + num::shape_string(s) + " does not match [B, N, " +
                              std::to_string(config.past_steps) + ", " + std::to_string(config.variates) + "]");
    }
    // [B, N, T, F] -> [B, N, F, T] -> one row per variate series.
    const Var<T> series = num::reshape(num::swap_last_axes(past), Shape{s[0] * s[1] * s[3], s[2]});
    return affine(weights, std::string("embed"), series);
}

template <typename T>
Var<T> masked_multivariate_attention(const ModelConfig &config, const Weights<T> &weights, std::size_t layer,
                                     const Var<T> &tokens, const num::AttentionMask<T> &mask, std::size_t batch,
                                     Array<T> *attention) {
    check_layer(config, layer);
    if (batch == 0 || tokens.shape().size() != 2 || tokens.shape()[1] != config.d_model ||
        tokens.shape()[0] % (batch * config.variates) != 0) {
        throw num::ShapeError("mma: tokens " + num::shape_string(tokens.shape()) + " do not form " +
                              std::to_string(batch) + " scenes");
    }
    const std::size_t seq = tokens.shape()[0] / batch;
    const std::string p = layer_prefix(layer);
    Var<T> out = attention_block(weights, p + ".mma", p + ".mma_norm", tokens,
                                 num::kernels::AttentionDims{batch, seq, config.heads, config.d_model}, mask, attention);
    if (config.mma_residual) out = num::add(out, tokens);
    return out;
}

template <typename T>
Var<T> agent_attention(const ModelConfig &config, const Weights<T> &weights, std::size_t layer,
                       const Var<T> &agent_tokens, const num::AttentionMask<T> &mask, std::size_t batch,
                       Array<T> *attention) {
    check_layer(config, layer);
    if (!config.agent_attention) throw std::invalid_argument("agent_attention: disabled in this config");
    if (batch == 0 || agent_tokens.shape().size() != 2 || agent_tokens.shape()[1] != config.agent_width() ||
        agent_tokens.shape()[0] % batch != 0) {
        throw num::ShapeError("agent attention: tokens " + num::shape_string(agent_tokens.shape()) + " do not form " +
                              std::to_string(batch) + " scenes");
    }
    const std::size_t agents = agent_tokens.shape()[0] / batch;
    const std::string p = layer_prefix(layer);
    const Var<T> out =
        attention_block(weights, p + ".aa", p + ".aa_norm", agent_tokens,
                        num::kernels::AttentionDims{batch, agents, config.heads, config.agent_width()}, mask,
                        attention);
    return num::add(out, agent_tokens);
}

template <typename T>
Var<T> ffn(const ModelConfig &config, const Weights<T> &weights, std::size_t layer, const Var<T> &tokens) {
    check_layer(config, layer);
    const std::string p = layer_prefix(layer);
    const Var<T> h = norm(weights, p + ".ffn_norm", tokens);
    const Var<T> inner = num::gelu(affine(weights, p + ".ffn.fc1", h));
    return num::add(affine(weights, p + ".ffn.fc2", inner), tokens);
}

template <typename T>
Var<T> decode(const ModelConfig &config, const Weights<T> &weights, const Var<T> &tokens, std::size_t batch,
              std::size_t agents) {
    Var<T> h = tokens;
    for (std::size_t i = 0; i < config.decoder_widths.size(); ++i) {
        h = num::gelu(affine(weights, "decoder.hidden." + std::to_string(i), h));
    }
    h = affine(weights, std::string("decoder.out"), h); // [B*N*F, S]
    h = num::reshape(h, Shape{batch, agents, config.variates, config.future_steps});
    return num::swap_last_axes(h);
}

template <typename T>
Prediction<T> forward(const ModelConfig &config, const Weights<T> &weights, const Var<T> &past,
                      const std::vector<std::uint8_t> &validity, bool record_attention) {
    config.validate();
    const Shape &s = past.shape();
    if (s.size() != 4) throw num::ShapeError("forward: past block must be [B, N, T, F]");
    const std::size_t batch = s[0], agents = s[1], f = config.variates;
    if (agents > config.max_agents) {
        throw std::invalid_argument("forward: " + std::to_string(agents) + " agents exceed N_max=" +
                                    std::to_string(config.max_agents));
    }
    if (validity.size() != batch * agents) throw num::ShapeError("forward: validity must have B*N entries");

    Prediction<T> result;
    AttentionRecord &rec = result.record;
    if (record_attention) {
        rec.batch = batch;
        rec.agents = agents;
        rec.variates = f;
        rec.heads = config.heads;
        rec.validity = validity;
    }
    const auto token_mask = mma_mask<T>(validity, batch, agents, f);
    const auto agents_mask = config.agent_attention ? agent_mask<T>(validity, batch, agents) : num::AttentionMask<T>{};

    Var<T> c = tokenize_scene(config, weights, past);
    Array<T> captured;
    for (std::size_t l = 0; l < config.layers; ++l) {
        Var<T> c_st = masked_multivariate_attention(config, weights, l, c, token_mask, batch,
                                                    record_attention ? &captured : nullptr);
        if (record_attention) rec.mma.push_back(captured.template cast<double>());
        Var<T> c_sc = num::reshape(c_st, Shape{batch * agents, f * config.d_model});
        if (config.agent_attention) {
            c_sc = agent_attention(config, weights, l, c_sc, agents_mask, batch,
                                   record_attention ? &captured : nullptr);
            if (record_attention) rec.aa.push_back(captured.template cast<double>());
        }
        c = ffn(config, weights, l, num::reshape(c_sc, Shape{batch * agents * f, config.d_model}));
    }
    result.output = decode(config, weights, c, batch, agents);
    return result;
}

#define MAIFORMER_INSTANTIATE_MODEL(T)                                                                           \
    template Var<T> tokenize_scene<T>(const ModelConfig &, const Weights<T> &, const Var<T> &);                  \
    template Var<T> masked_multivariate_attention<T>(const ModelConfig &, const Weights<T> &, std::size_t,       \
                                                     const Var<T> &, const num::AttentionMask<T> &, std::size_t, \
                                                     Array<T> *);                                                \
    template Var<T> agent_attention<T>(const ModelConfig &, const Weights<T> &, std::size_t, const Var<T> &,     \
                                       const num::AttentionMask<T> &, std::size_t, Array<T> *);                  \
    template Var<T> ffn<T>(const ModelConfig &, const Weights<T> &, std::size_t, const Var<T> &);                \
    template Var<T> decode<T>(const ModelConfig &, const Weights<T> &, const Var<T> &, std::size_t, std::size_t); \
    template Prediction<T> forward<T>(const ModelConfig &, const Weights<T> &, const Var<T> &,                   \
                                      const std::vector<std::uint8_t> &, bool);

MAIFORMER_INSTANTIATE_MODEL(float)
MAIFORMER_INSTANTIATE_MODEL(double)

} // namespace maiformer::model
