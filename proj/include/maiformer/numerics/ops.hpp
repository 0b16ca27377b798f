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
#include <span>
#include <vector>

#include "maiformer/numerics/autograd.hpp"
#include "maiformer/numerics/kernels.hpp"

namespace maiformer::num {

inline constexpr double kLayerNormEps = 1e-5;

/// x[..., in] * weight[in, out] + bias[out]. `bias` may be undefined.
template <typename T>
Var<T> linear(const Var<T> &x, const Var<T> &weight, const Var<T> &bias);

template <typename T>
Var<T> add(const Var<T> &a, const Var<T> &b);

/// Element-wise product.
template <typename T>
Var<T> mul(const Var<T> &a, const Var<T> &b);

/// Sum of all elements, as a [1] array.
template <typename T>
Var<T> sum(const Var<T> &a);

template <typename T>
Var<T> reshape(const Var<T> &x, Shape shape);

/// [..., A, B] -> [..., B, A].
template <typename T>
Var<T> swap_last_axes(const Var<T> &x);

/// Normalizes each trailing-axis vector to zero mean and unit variance, then
/// applies gain and offset.
template <typename T>
Var<T> layer_norm(const Var<T> &x, const Var<T> &gain, const Var<T> &offset, T eps = T(kLayerNormEps));

/// x * Phi(x) with the exact Gaussian CDF.
template <typename T>
Var<T> gelu(const Var<T> &x);

/// Additive attention mask: [groups or 1, L, L] of 0/finite (allowed) and
/// -inf (forbidden) entries, plus optional per-query-row activity flags.
/// Inactive rows may be fully forbidden and produce zeros; a fully forbidden
/// active row is an error.
template <typename T>
struct AttentionMask {
    Array<T> additive;
    std::vector<std::uint8_t> row_active;
};

template <typename T>
struct AttentionResult {
    Var<T> output;
    Array<T> weights; // [groups, heads, L, L], not differentiable
};

/// Batched multi-head softmax(q k^T / sqrt(d_head) + mask) v. No projections.
template <typename T>
AttentionResult<T> multi_head_attention(const Var<T> &q, const Var<T> &k, const Var<T> &v,
                                        const kernels::AttentionDims &dims, const AttentionMask<T> &mask);

/// Single-head form on [L, D_h] inputs with an [L, L] additive mask.
template <typename T>
AttentionResult<T> masked_scaled_attention(const Var<T> &q, const Var<T> &k, const Var<T> &v,
                                           const Array<T> &mask);

/// Mean squared error over the units flagged in `valid`. The leading
/// elements of pred are split evenly into valid.size() units.
template <typename T>
Var<T> masked_mse(const Var<T> &pred, const Array<T> &target, std::span<const std::uint8_t> valid);

} // namespace maiformer::num
