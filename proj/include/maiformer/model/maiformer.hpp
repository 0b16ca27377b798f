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

// The encoder-decoder. Token layout throughout is agent-major,
// variate-minor: row (b * N + n) * F + f holds variate f of agent n in
// scene b. Viewing the same memory as [B * N, F * D] gives the agent tokens,
// so the reshapes between the two forms are free.

#include <cstdint>
#include <vector>

#include "maiformer/model/attention_record.hpp"
#include "maiformer/model/config.hpp"
#include "maiformer/numerics/ops.hpp"
#include "maiformer/numerics/parameters.hpp"

namespace maiformer::model {

template <typename T>
using Weights = num::ParameterSet<T>;

/// past [B, N, T, F] -> variate tokens [B * N * F, D]; one shared T->D
/// linear map, no positional encoding.
template <typename T>
num::Var<T> tokenize_scene(const ModelConfig &config, const Weights<T> &weights, const num::Var<T> &past);

/// LN then H-head masked self attention over the N*F variate tokens of each
/// scene, output-projected. Adds the input back only if config.mma_residual.
/// `attention` (optional) receives the [B, H, N*F, N*F] weights.
template <typename T>
num::Var<T> masked_multivariate_attention(const ModelConfig &config, const Weights<T> &weights, std::size_t layer,
                                          const num::Var<T> &tokens, const num::AttentionMask<T> &mask,
                                          std::size_t batch, num::Array<T> *attention = nullptr);

/// LN then H-head self attention across the agent tokens [B * N, F * D] of
/// each scene, output-projected, plus the residual.
template <typename T>
num::Var<T> agent_attention(const ModelConfig &config, const Weights<T> &weights, std::size_t layer,
                            const num::Var<T> &agent_tokens, const num::AttentionMask<T> &mask, std::size_t batch,
                            num::Array<T> *attention = nullptr);

/// LN, GELU(x W1 + b1) W2 + b2, plus the residual; token-wise.
template <typename T>
num::Var<T> ffn(const ModelConfig &config, const Weights<T> &weights, std::size_t layer, const num::Var<T> &tokens);

/// MLP head on every variate token, then [B*N*F, S] -> [B, N, S, F].
template <typename T>
num::Var<T> decode(const ModelConfig &config, const Weights<T> &weights, const num::Var<T> &tokens,
                   std::size_t batch, std::size_t agents);

template <typename T>
struct Prediction {
    num::Var<T> output; // [B, N, S, F]
    AttentionRecord record;
};

/// Full forward pass. `validity` is [B * N]; padded agents get outputs that
/// callers must ignore. Reads nothing but the past block.
template <typename T>
Prediction<T> forward(const ModelConfig &config, const Weights<T> &weights, const num::Var<T> &past,
                      const std::vector<std::uint8_t> &validity, bool record_attention = false);

} // namespace maiformer::model
