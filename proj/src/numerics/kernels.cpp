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

#include "maiformer/numerics/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maiformer::num::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

namespace {

template <typename T>
inline T gelu_value(T x) {
    return T(0.5) * x * (T(1) + std::erf(x * T(0.70710678118654752440)));
}

template <typename T>
inline T gelu_slope(T x) {
    const T cdf = T(0.5) * (T(1) + std::erf(x * T(0.70710678118654752440)));
    const T pdf = std::exp(T(-0.5) * x * x) * T(0.39894228040143267794);
    return cdf + x * pdf;
}

template <typename T>
inline bool forbidden(T m) {
    return m == -std::numeric_limits<T>::infinity();
}

template <typename T>
std::span<const T> mask_block(const MaskView<T> &mask, std::size_t g, std::size_t L) {
    const std::size_t offset = mask.mask_groups == 1 ? 0 : g * L * L;
    return mask.values.subspan(offset, L * L);
}

// One (group, head) slice of masked softmax attention. Shared by both kernel
// families: the work split across slices is what differs.
template <typename T>
void attention_slice_forward(std::span<const T> q, std::span<const T> k, std::span<const T> v,
                             const AttentionDims &dims, const MaskView<T> &mask, std::size_t g, std::size_t h,
                             std::span<T> out, std::span<T> weights) {
    const std::size_t L = dims.seq_len;
    const std::size_t D = dims.width;
    const std::size_t dh = dims.head_width();
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));
    const auto m = mask_block(mask, g, L);
    T *w = weights.data() + (g * dims.heads + h) * L * L;

    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t row = g * L + i;
        T *wrow = w + i * L;
        T *orow = out.data() + row * D + h * dh;
        for (std::size_t c = 0; c < dh; ++c) orow[c] = T(0);
        if (!mask.row_active.empty() && mask.row_active[row] == 0) {
            for (std::size_t j = 0; j < L; ++j) wrow[j] = T(0);
            continue;
        }
        const T *qi = q.data() + row * D + h * dh;
        T top = -std::numeric_limits<T>::infinity();
        bool any = false;
        for (std::size_t j = 0; j < L; ++j) {
            const T mij = m[i * L + j];
            if (forbidden(mij)) {
                wrow[j] = T(0);
                continue;
            }
            const T *kj = k.data() + (g * L + j) * D + h * dh;
            T dot = T(0);
            for (std::size_t c = 0; c < dh; ++c) dot += qi[c] * kj[c];
            const T logit = dot * scale + mij;
            wrow[j] = logit;
            if (!any || logit > top) top = logit;
            any = true;
        }
        if (!any) {
            for (std::size_t j = 0; j < L; ++j) wrow[j] = T(0);
            continue;
        }
        T total = T(0);
        for (std::size_t j = 0; j < L; ++j) {
            if (forbidden(m[i * L + j])) continue;
            const T e = std::exp(wrow[j] - top);
            wrow[j] = e;
            total += e;
        }
        for (std::size_t j = 0; j < L; ++j) {
            if (forbidden(m[i * L + j])) continue;
            wrow[j] /= total;
            const T *vj = v.data() + (g * L + j) * D + h * dh;
            const T wij = wrow[j];
            for (std::size_t c = 0; c < dh; ++c) orow[c] += wij * vj[c];
        }
    }
}

template <typename T>
void attention_slice_backward(std::span<const T> q, std::span<const T> k, std::span<const T> v,
                              std::span<const T> weights, std::span<const T> dout, const AttentionDims &dims,
                              std::size_t g, std::size_t h, std::span<T> dq, std::span<T> dk, std::span<T> dv,
                              std::vector<T> &dp) {
    const std::size_t L = dims.seq_len;
    const std::size_t D = dims.width;
    const std::size_t dh = dims.head_width();
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));
    const T *w = weights.data() + (g * dims.heads + h) * L * L;
    dp.assign(L, T(0));

    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t row = g * L + i;
        const T *wrow = w + i * L;
        const T *doi = dout.data() + row * D + h * dh;
        T inner = T(0);
        for (std::size_t j = 0; j < L; ++j) {
            dp[j] = T(0);
            if (wrow[j] == T(0)) continue;
            const std::size_t col = (g * L + j) * D + h * dh;
            const T *vj = v.data() + col;
            T *dvj = dv.data() + col;
            T dot = T(0);
            for (std::size_t c = 0; c < dh; ++c) {
                dot += doi[c] * vj[c];
                dvj[c] += wrow[j] * doi[c];
            }
            dp[j] = dot;
            inner += wrow[j] * dot;
        }
        const T *qi = q.data() + row * D + h * dh;
        T *dqi = dq.data() + row * D + h * dh;
        for (std::size_t j = 0; j < L; ++j) {
            if (wrow[j] == T(0)) continue;
            const T ds = wrow[j] * (dp[j] - inner) * scale;
            const std::size_t col = (g * L + j) * D + h * dh;
            const T *kj = k.data() + col;
            T *dkj = dk.data() + col;
            for (std::size_t c = 0; c < dh; ++c) {
                dqi[c] += ds * kj[c];
                dkj[c] += ds * qi[c];
            }
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Serial reference kernels
// ---------------------------------------------------------------------------
namespace reference {

template <typename T>
void affine_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w, std::size_t out,
                    std::span<const T> b, std::span<T> y) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t o = 0; o < out; ++o) {
            T acc = b.empty() ? T(0) : b[o];
            for (std::size_t i = 0; i < in; ++i) acc += x[r * in + i] * w[i * out + o];
            y[r * out + o] = acc;
        }
    }
}

template <typename T>
void affine_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> w,
                           std::size_t in, std::span<T> dx) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < in; ++i) {
            T acc = T(0);
            for (std::size_t o = 0; o < out; ++o) acc += dy[r * out + o] * w[i * out + o];
            dx[r * in + i] += acc;
        }
    }
}

template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::size_t rows, std::size_t in,
                            std::size_t out, std::span<T> dw, std::span<T> db) {
    for (std::size_t i = 0; i < in; ++i) {
        for (std::size_t o = 0; o < out; ++o) {
            T acc = dw[i * out + o];
            for (std::size_t r = 0; r < rows; ++r) acc += x[r * in + i] * dy[r * out + o];
            dw[i * out + o] = acc;
        }
    }
    if (!db.empty()) {
        for (std::size_t o = 0; o < out; ++o) {
            T acc = db[o];
            for (std::size_t r = 0; r < rows; ++r) acc += dy[r * out + o];
            db[o] = acc;
        }
    }
}

template <typename T>
void layer_norm_forward(std::span<const T> x, std::size_t rows, std::size_t width, std::span<const T> gain,
                        std::span<const T> offset, T eps, std::span<T> y, std::span<T> mean, std::span<T> rstd) {
    for (std::size_t r = 0; r < rows; ++r) {
        const T *xr = x.data() + r * width;
        T mu = T(0);
        for (std::size_t c = 0; c < width; ++c) mu += xr[c];
        mu /= static_cast<T>(width);
        T var = T(0);
        for (std::size_t c = 0; c < width; ++c) var += (xr[c] - mu) * (xr[c] - mu);
        var /= static_cast<T>(width);
        const T s = T(1) / std::sqrt(var + eps);
        mean[r] = mu;
        rstd[r] = s;
        for (std::size_t c = 0; c < width; ++c) y[r * width + c] = (xr[c] - mu) * s * gain[c] + offset[c];
    }
}

template <typename T>
void layer_norm_backward(std::span<const T> dy, std::span<const T> x, std::size_t rows, std::size_t width,
                         std::span<const T> gain, std::span<const T> mean, std::span<const T> rstd,
                         std::span<T> dx, std::span<T> dgain, std::span<T> doffset) {
    const T n = static_cast<T>(width);
    for (std::size_t r = 0; r < rows; ++r) {
        T sum_g = T(0);
        T sum_gx = T(0);
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (x[r * width + c] - mean[r]) * rstd[r];
            const T g = dy[r * width + c] * gain[c];
            sum_g += g;
            sum_gx += g * xhat;
        }
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (x[r * width + c] - mean[r]) * rstd[r];
            const T g = dy[r * width + c] * gain[c];
            dx[r * width + c] += rstd[r] * (g - sum_g / n - xhat * (sum_gx / n));
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (x[r * width + c] - mean[r]) * rstd[r];
            dgain[c] += dy[r * width + c] * xhat;
            doffset[c] += dy[r * width + c];
        }
    }
}

template <typename T>
void gelu_forward(std::span<const T> x, std::span<T> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = gelu_value(x[i]);
}

template <typename T>
void gelu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx) {
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] += dy[i] * gelu_slope(x[i]);
}

template <typename T>
void attention_forward(std::span<const T> q, std::span<const T> k, std::span<const T> v, const AttentionDims &dims,
                       const MaskView<T> &mask, std::span<T> out, std::span<T> weights) {
    for (std::size_t g = 0; g < dims.groups; ++g) {
        for (std::size_t h = 0; h < dims.heads; ++h) {
            attention_slice_forward(q, k, v, dims, mask, g, h, out, weights);
        }
    }
}

template <typename T>
void attention_backward(std::span<const T> q, std::span<const T> k, std::span<const T> v,
                        std::span<const T> weights, std::span<const T> dout, const AttentionDims &dims,
                        std::span<T> dq, std::span<T> dk, std::span<T> dv) {
    std::vector<T> dp;
    for (std::size_t g = 0; g < dims.groups; ++g) {
        for (std::size_t h = 0; h < dims.heads; ++h) {
            attention_slice_backward(q, k, v, weights, dout, dims, g, h, dq, dk, dv, dp);
        }
    }
}

} // namespace reference

// ---------------------------------------------------------------------------
// OpenMP kernels
// ---------------------------------------------------------------------------
namespace omp {

template <typename T>
void affine_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w, std::size_t out,
                    std::span<const T> b, std::span<T> y) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        T *yr = y.data() + r * out;
        const T *xr = x.data() + r * in;
        for (std::size_t o = 0; o < out; ++o) yr[o] = b.empty() ? T(0) : b[o];
        for (std::size_t i = 0; i < in; ++i) {
            const T xv = xr[i];
            const T *wi = w.data() + i * out;
            for (std::size_t o = 0; o < out; ++o) yr[o] += xv * wi[o];
        }
    }
}

template <typename T>
void affine_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> w,
                           std::size_t in, std::span<T> dx) {
    // Row-axpy over a transposed weight so the inner loop is contiguous.
    std::vector<T> wt(in * out);
    for (std::size_t i = 0; i < in; ++i)
        for (std::size_t o = 0; o < out; ++o) wt[o * in + i] = w[i * out + o];
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel
    {
        std::vector<T> acc(in);
#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < n; ++r) {
            std::fill(acc.begin(), acc.end(), T(0));
            const T *dyr = dy.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) {
                const T g = dyr[o];
                const T *wo = wt.data() + o * in;
                for (std::size_t i = 0; i < in; ++i) acc[i] += g * wo[i];
            }
            T *dxr = dx.data() + r * in;
            for (std::size_t i = 0; i < in; ++i) dxr[i] += acc[i];
        }
    }
}

template <typename T>
void affine_backward_params(std::span<const T> x, std::span<const T> dy, std::size_t rows, std::size_t in,
                            std::size_t out, std::span<T> dw, std::span<T> db) {
    const std::ptrdiff_t n_in = static_cast<std::ptrdiff_t>(in);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n_in; ++i) {
        T *dwi = dw.data() + i * out;
        for (std::size_t r = 0; r < rows; ++r) {
            const T xv = x[r * in + i];
            const T *dyr = dy.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) dwi[o] += xv * dyr[o];
        }
    }
    if (!db.empty()) {
        for (std::size_t r = 0; r < rows; ++r) {
            const T *dyr = dy.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) db[o] += dyr[o];
        }
    }
}

template <typename T>
void layer_norm_forward(std::span<const T> x, std::size_t rows, std::size_t width, std::span<const T> gain,
                        std::span<const T> offset, T eps, std::span<T> y, std::span<T> mean, std::span<T> rstd) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        const T *xr = x.data() + r * width;
        T mu = T(0);
        for (std::size_t c = 0; c < width; ++c) mu += xr[c];
        mu /= static_cast<T>(width);
        T var = T(0);
        for (std::size_t c = 0; c < width; ++c) var += (xr[c] - mu) * (xr[c] - mu);
        var /= static_cast<T>(width);
        const T s = T(1) / std::sqrt(var + eps);
        mean[r] = mu;
        rstd[r] = s;
        T *yr = y.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) yr[c] = (xr[c] - mu) * s * gain[c] + offset[c];
    }
}

template <typename T>
void layer_norm_backward(std::span<const T> dy, std::span<const T> x, std::size_t rows, std::size_t width,
                         std::span<const T> gain, std::span<const T> mean, std::span<const T> rstd,
                         std::span<T> dx, std::span<T> dgain, std::span<T> doffset) {
    const T n = static_cast<T>(width);
    const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < nr; ++r) {
        const T *xr = x.data() + r * width;
        const T *dyr = dy.data() + r * width;
        T sum_g = T(0);
        T sum_gx = T(0);
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (xr[c] - mean[r]) * rstd[r];
            const T g = dyr[c] * gain[c];
            sum_g += g;
            sum_gx += g * xhat;
        }
        T *dxr = dx.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (xr[c] - mean[r]) * rstd[r];
            const T g = dyr[c] * gain[c];
            dxr[c] += rstd[r] * (g - sum_g / n - xhat * (sum_gx / n));
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const T *xr = x.data() + r * width;
        const T *dyr = dy.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            const T xhat = (xr[c] - mean[r]) * rstd[r];
            dgain[c] += dyr[c] * xhat;
            doffset[c] += dyr[c];
        }
    }
}

template <typename T>
void gelu_forward(std::span<const T> x, std::span<T> y) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = gelu_value(x[i]);
}

template <typename T>
void gelu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dx[i] += dy[i] * gelu_slope(x[i]);
}

template <typename T>
void attention_forward(std::span<const T> q, std::span<const T> k, std::span<const T> v, const AttentionDims &dims,
                       const MaskView<T> &mask, std::span<T> out, std::span<T> weights) {
    const std::ptrdiff_t slices = static_cast<std::ptrdiff_t>(dims.groups * dims.heads);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t s = 0; s < slices; ++s) {
        const std::size_t g = static_cast<std::size_t>(s) / dims.heads;
        const std::size_t h = static_cast<std::size_t>(s) % dims.heads;
        attention_slice_forward(q, k, v, dims, mask, g, h, out, weights);
    }
}

template <typename T>
void attention_backward(std::span<const T> q, std::span<const T> k, std::span<const T> v,
                        std::span<const T> weights, std::span<const T> dout, const AttentionDims &dims,
                        std::span<T> dq, std::span<T> dk, std::span<T> dv) {
    const std::ptrdiff_t slices = static_cast<std::ptrdiff_t>(dims.groups * dims.heads);
#pragma omp parallel
    {
        std::vector<T> dp;
#pragma omp for schedule(dynamic, 4)
        for (std::ptrdiff_t s = 0; s < slices; ++s) {
            const std::size_t g = static_cast<std::size_t>(s) / dims.heads;
            const std::size_t h = static_cast<std::size_t>(s) % dims.heads;
            attention_slice_backward(q, k, v, weights, dout, dims, g, h, dq, dk, dv, dp);
        }
    }
}

} // namespace omp

#define MAIFORMER_INSTANTIATE(NS, T)                                                                             \
    template void NS::affine_forward<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>,        \
                                        std::size_t, std::span<const T>, std::span<T>);                          \
    template void NS::affine_backward_input<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>, \
                                               std::size_t, std::span<T>);                                       \
    template void NS::affine_backward_params<T>(std::span<const T>, std::span<const T>, std::size_t,             \
                                                std::size_t, std::size_t, std::span<T>, std::span<T>);           \
    template void NS::layer_norm_forward<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>,    \
                                            std::span<const T>, T, std::span<T>, std::span<T>, std::span<T>);    \
    template void NS::layer_norm_backward<T>(std::span<const T>, std::span<const T>, std::size_t, std::size_t,   \
                                             std::span<const T>, std::span<const T>, std::span<const T>,         \
                                             std::span<T>, std::span<T>, std::span<T>);                          \
    template void NS::gelu_forward<T>(std::span<const T>, std::span<T>);                                         \
    template void NS::gelu_backward<T>(std::span<const T>, std::span<const T>, std::span<T>);                   \
    template void NS::attention_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>,           \
                                           const AttentionDims &, const MaskView<T> &, std::span<T>,             \
                                           std::span<T>);                                                        \
    template void NS::attention_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,          \
                                            std::span<const T>, std::span<const T>, const AttentionDims &,       \
                                            std::span<T>, std::span<T>, std::span<T>);

MAIFORMER_INSTANTIATE(reference, float)
MAIFORMER_INSTANTIATE(reference, double)
MAIFORMER_INSTANTIATE(omp, float)
MAIFORMER_INSTANTIATE(omp, double)

#undef MAIFORMER_INSTANTIATE

} // namespace maiformer::num::kernels
