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

// Raw compute kernels behind the differentiable ops.
//
// Every kernel exists twice: `reference` is the plain serial loop nest kept
// as the test oracle, `omp` is the OpenMP version used by the ops. Both
// compute each output element with the same accumulation order, so their
// results agree bit for bit and do not depend on the thread count.
//
// Backward kernels accumulate (+=) into their gradient outputs.

#include <cstddef>
#include <cstdint>
#include <span>

namespace maiformer::num::kernels {

/// Layout of a batched multi-head attention problem.
/// q, k, v and out are [groups * seq_len, width]; head h owns columns
/// [h * width / heads, (h + 1) * width / heads). Attention weights are
/// [groups, heads, seq_len, seq_len].
struct AttentionDims {
    std::size_t groups = 1;
    std::size_t seq_len = 0;
    std::size_t heads = 1;
    std::size_t width = 0;

    std::size_t head_width() const { return width / heads; }
};

/// Additive mask of [mask_groups, seq_len, seq_len] with mask_groups either 1
/// (shared by all groups) or equal to groups. Entries are finite (allowed) or
/// -inf (forbidden). `row_active`, when non-empty, flags the query rows
/// ([groups * seq_len]) that must produce output; inactive rows yield zeros.
template <typename T>
struct MaskView {
    std::span<const T> values;
    std::size_t mask_groups = 0;
    std::span<const std::uint8_t> row_active;
};

#define MAIFORMER_KERNEL_DECLS                                                                                  \
    template <typename T>                                                                                       \
    void affine_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w,            \
                        std::size_t out, std::span<const T> b, std::span<T> y);                                  \
    template <typename T>                                                                                       \
    void affine_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> w,   \
                               std::size_t in, std::span<T> dx);                                                 \
    template <typename T>                                                                                       \
    void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::size_t rows, std::size_t in,   \
                                std::size_t out, std::span<T> dw, std::span<T> db);                              \
    template <typename T>                                                                                       \
    void layer_norm_forward(std::span<const T> x, std::size_t rows, std::size_t width, std::span<const T> gain,  \
                            std::span<const T> offset, T eps, std::span<T> y, std::span<T> mean,                 \
                            std::span<T> rstd);                                                                  \
    template <typename T>                                                                                       \
    void layer_norm_backward(std::span<const T> dy, std::span<const T> x, std::size_t rows, std::size_t width,   \
                             std::span<const T> gain, std::span<const T> mean, std::span<const T> rstd,          \
                             std::span<T> dx, std::span<T> dgain, std::span<T> doffset);                         \
    template <typename T>                                                                                       \
    void gelu_forward(std::span<const T> x, std::span<T> y);                                                    \
    template <typename T>                                                                                       \
    void gelu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx);                          \
    template <typename T>                                                                                       \
    void attention_forward(std::span<const T> q, std::span<const T> k, std::span<const T> v,                    \
                           const AttentionDims &dims, const MaskView<T> &mask, std::span<T> out,                 \
                           std::span<T> weights);                                                                \
    template <typename T>                                                                                       \
    void attention_backward(std::span<const T> q, std::span<const T> k, std::span<const T> v,                   \
                            std::span<const T> weights, std::span<const T> dout, const AttentionDims &dims,      \
                            std::span<T> dq, std::span<T> dk, std::span<T> dv);

namespace reference {
MAIFORMER_KERNEL_DECLS
} // namespace reference

namespace omp {
MAIFORMER_KERNEL_DECLS
} // namespace omp

#undef MAIFORMER_KERNEL_DECLS

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

} // namespace maiformer::num::kernels
