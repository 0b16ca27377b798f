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

#include "maiformer/numerics/ops.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace maiformer::num {

namespace {

template <typename T>
std::span<const T> cspan(const Array<T> &a) {
    return a.values();
}

template <typename T>
std::vector<std::shared_ptr<Node<T>>> parents_of(std::initializer_list<const Var<T> *> vars) {
    std::vector<std::shared_ptr<Node<T>>> out;
    for (const Var<T> *v : vars) {
        if (v != nullptr && v->defined()) out.push_back(v->node());
    }
    return out;
}

void require_same(const Shape &a, const Shape &b, const char *op) {
    if (a != b) throw ShapeError(std::string(op) + ": shape " + shape_string(a) + " vs " + shape_string(b));
}

} // namespace

template <typename T>
Var<T> linear(const Var<T> &x, const Var<T> &weight, const Var<T> &bias) {
    const Shape &xs = x.shape();
    const Shape &ws = weight.shape();
    if (xs.empty() || ws.size() != 2 || xs.back() != ws[0]) {
        throw ShapeError("linear: input " + shape_string(xs) + " incompatible with weight " + shape_string(ws));
    }
    const std::size_t in = ws[0];
    const std::size_t out = ws[1];
    if (bias.defined() && (bias.shape().size() != 1 || bias.shape()[0] != out)) {
        throw ShapeError("linear: bias " + shape_string(bias.shape()) + " for " + std::to_string(out) + " outputs");
    }
    const std::size_t rows = x.value().size() / in;
    Shape ys = xs;
    ys.back() = out;
    Array<T> y(ys);
    kernels::omp::affine_forward<T>(cspan(x.value()), rows, in, cspan(weight.value()), out,
                                    bias.defined() ? cspan(bias.value()) : std::span<const T>{}, y.values());
    require_finite(y, "linear");
    if (!any_requires_grad<T>({&x, &weight, &bias})) return Var<T>(std::move(y));

    return Var<T>::make_result(std::move(y), parents_of<T>({&x, &weight, &bias}),
                               [rows, in, out, has_bias = bias.defined()](Node<T> &self) {
                                   Node<T> &px = *self.parents[0];
                                   Node<T> &pw = *self.parents[1];
                                   const auto dy = cspan(self.grad);
                                   if (px.requires_grad) {
                                       kernels::omp::affine_backward_input<T>(dy, rows, out, cspan(pw.value), in,
                                                                              px.grad_buffer().values());
                                   }
                                   const bool need_b = has_bias && self.parents[2]->requires_grad;
                                   if (pw.requires_grad || need_b) {
                                       Array<T> scratch_w;
                                       std::span<T> dw;
                                       if (pw.requires_grad) {
                                           dw = pw.grad_buffer().values();
                                       } else {
                                           scratch_w = Array<T>(pw.value.shape());
                                           dw = scratch_w.values();
                                       }
                                       std::span<T> db = need_b ? self.parents[2]->grad_buffer().values()
                                                                : std::span<T>{};
                                       kernels::omp::affine_backward_params<T>(cspan(px.value), dy, rows, in, out,
                                                                               dw, db);
                                   }
                               });
}

template <typename T>
Var<T> add(const Var<T> &a, const Var<T> &b) {
    require_same(a.shape(), b.shape(), "add");
    Array<T> y(a.shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] + b.value()[i];
    require_finite(y, "add");
    if (!any_requires_grad<T>({&a, &b})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&a, &b}), [](Node<T> &self) {
        for (auto &p : self.parents) {
            if (!p->requires_grad) continue;
            Array<T> &g = p->grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

template <typename T>
Var<T> mul(const Var<T> &a, const Var<T> &b) {
    require_same(a.shape(), b.shape(), "mul");
    Array<T> y(a.shape());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * b.value()[i];
    require_finite(y, "mul");
    if (!any_requires_grad<T>({&a, &b})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&a, &b}), [](Node<T> &self) {
        Node<T> &pa = *self.parents[0];
        Node<T> &pb = *self.parents[1];
        if (pa.requires_grad) {
            Array<T> &g = pa.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            Array<T> &g = pb.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
        }
    });
}

template <typename T>
Var<T> sum(const Var<T> &a) {
    T total = T(0);
    for (T v : a.value().values()) total += v;
    Array<T> y(Shape{1}, total);
    require_finite(y, "sum");
    if (!any_requires_grad<T>({&a})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&a}), [](Node<T> &self) {
        Array<T> &g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
    });
}

template <typename T>
Var<T> reshape(const Var<T> &x, Shape shape) {
    Array<T> y = x.value().reshaped(std::move(shape));
    if (!any_requires_grad<T>({&x})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&x}), [](Node<T> &self) {
        Array<T> &g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
}

template <typename T>
Var<T> swap_last_axes(const Var<T> &x) {
    const Shape &xs = x.shape();
    if (xs.size() < 2) throw ShapeError("swap_last_axes: need rank >= 2, got " + shape_string(xs));
    const std::size_t a = xs[xs.size() - 2];
    const std::size_t b = xs.back();
    const std::size_t outer = x.value().size() / (a * b);
    Shape ys = xs;
    std::swap(ys[ys.size() - 2], ys.back());
    Array<T> y(ys);
    const T *src = x.value().data();
    T *dst = y.data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < a; ++i) {
            for (std::size_t j = 0; j < b; ++j) dst[o * a * b + j * a + i] = src[o * a * b + i * b + j];
        }
    }
    if (!any_requires_grad<T>({&x})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&x}), [outer, a, b](Node<T> &self) {
        Array<T> &g = self.parents[0]->grad_buffer();
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t i = 0; i < a; ++i) {
                for (std::size_t j = 0; j < b; ++j) g[o * a * b + i * b + j] += self.grad[o * a * b + j * a + i];
            }
        }
    });
}

template <typename T>
Var<T> layer_norm(const Var<T> &x, const Var<T> &gain, const Var<T> &offset, T eps) {
    const Shape &xs = x.shape();
    if (xs.empty()) throw ShapeError("layer_norm: scalar input");
    const std::size_t width = xs.back();
    if (width < 2) throw ShapeError("layer_norm: normalized width must be >= 2");
    require_same(gain.shape(), Shape{width}, "layer_norm gain");
    require_same(offset.shape(), Shape{width}, "layer_norm offset");
    const std::size_t rows = x.value().size() / width;
    Array<T> y(xs);
    Array<T> mean(Shape{rows});
    Array<T> rstd(Shape{rows});
    kernels::omp::layer_norm_forward<T>(cspan(x.value()), rows, width, cspan(gain.value()), cspan(offset.value()),
                                        eps, y.values(), mean.values(), rstd.values());
    require_finite(y, "layer_norm");
    if (!any_requires_grad<T>({&x, &gain, &offset})) return Var<T>(std::move(y));
    return Var<T>::make_result(
        std::move(y), parents_of<T>({&x, &gain, &offset}),
        [rows, width, mean = std::move(mean), rstd = std::move(rstd)](Node<T> &self) {
            Node<T> &px = *self.parents[0];
            Node<T> &pg = *self.parents[1];
            Node<T> &po = *self.parents[2];
            Array<T> scratch_x;
            Array<T> scratch_g;
            Array<T> scratch_o;
            auto target = [](Node<T> &p, Array<T> &scratch) {
                if (p.requires_grad) return p.grad_buffer().values();
                scratch = Array<T>(p.value.shape());
                return scratch.values();
            };
            kernels::omp::layer_norm_backward<T>(cspan(self.grad), cspan(px.value), rows, width, cspan(pg.value),
                                                 cspan(mean), cspan(rstd), target(px, scratch_x),
                                                 target(pg, scratch_g), target(po, scratch_o));
        });
}

template <typename T>
Var<T> gelu(const Var<T> &x) {
    Array<T> y(x.shape());
    kernels::omp::gelu_forward<T>(cspan(x.value()), y.values());
    require_finite(y, "gelu");
    if (!any_requires_grad<T>({&x})) return Var<T>(std::move(y));
    return Var<T>::make_result(std::move(y), parents_of<T>({&x}), [](Node<T> &self) {
        Node<T> &px = *self.parents[0];
        kernels::omp::gelu_backward<T>(cspan(px.value), cspan(self.grad), px.grad_buffer().values());
    });
}

template <typename T>
AttentionResult<T> multi_head_attention(const Var<T> &q, const Var<T> &k, const Var<T> &v,
                                        const kernels::AttentionDims &dims, const AttentionMask<T> &mask) {
    const Shape expect{dims.groups * dims.seq_len, dims.width};
    require_same(q.shape(), expect, "attention q");
    require_same(k.shape(), expect, "attention k");
    require_same(v.shape(), expect, "attention v");
    if (dims.heads == 0 || dims.width % dims.heads != 0) {
        throw ShapeError("attention: width " + std::to_string(dims.width) + " not divisible by " +
                         std::to_string(dims.heads) + " heads");
    }
    const std::size_t L = dims.seq_len;
    const Shape &ms = mask.additive.shape();
    if (ms.size() != 3 || ms[1] != L || ms[2] != L || (ms[0] != 1 && ms[0] != dims.groups)) {
        throw ShapeError("attention: mask " + shape_string(ms) + " does not fit " + std::to_string(dims.groups) +
                         " groups of length " + std::to_string(L));
    }
    if (!mask.row_active.empty() && mask.row_active.size() != dims.groups * L) {
        throw ShapeError("attention: row_active has " + std::to_string(mask.row_active.size()) + " entries");
    }
    for (std::size_t g = 0; g < dims.groups; ++g) {
        const std::size_t mg = ms[0] == 1 ? 0 : g;
        for (std::size_t i = 0; i < L; ++i) {
            if (!mask.row_active.empty() && mask.row_active[g * L + i] == 0) continue;
            bool any = false;
            for (std::size_t j = 0; j < L; ++j) {
                const T m = mask.additive(mg, i, j);
                if (std::isnan(m) || m == std::numeric_limits<T>::infinity()) {
                    throw NumericError("attention: mask entries must be finite or -inf");
                }
                any = any || std::isfinite(m);
            }
            if (!any) {
                throw NumericError("attention: query row " + std::to_string(i) + " of group " + std::to_string(g) +
                                   " has no allowed key (softmax undefined)");
            }
        }
    }

    Array<T> out(expect);
    Array<T> weights(Shape{dims.groups, dims.heads, L, L});
    const kernels::MaskView<T> view{cspan(mask.additive), ms[0], mask.row_active};
    kernels::omp::attention_forward<T>(cspan(q.value()), cspan(k.value()), cspan(v.value()), dims, view,
                                       out.values(), weights.values());
    require_finite(out, "attention");

    AttentionResult<T> result;
    result.weights = weights;
    if (!any_requires_grad<T>({&q, &k, &v})) {
        result.output = Var<T>(std::move(out));
        return result;
    }
    result.output = Var<T>::make_result(
        std::move(out), parents_of<T>({&q, &k, &v}), [dims, weights = std::move(weights)](Node<T> &self) {
            Node<T> &pq = *self.parents[0];
            Node<T> &pk = *self.parents[1];
            Node<T> &pv = *self.parents[2];
            Array<T> sq, sk, sv;
            auto target = [](Node<T> &p, Array<T> &scratch) {
                if (p.requires_grad) return p.grad_buffer().values();
                scratch = Array<T>(p.value.shape());
                return scratch.values();
            };
            kernels::omp::attention_backward<T>(cspan(pq.value), cspan(pk.value), cspan(pv.value), cspan(weights),
                                                cspan(self.grad), dims, target(pq, sq), target(pk, sk),
                                                target(pv, sv));
        });
    return result;
}

template <typename T>
AttentionResult<T> masked_scaled_attention(const Var<T> &q, const Var<T> &k, const Var<T> &v,
                                           const Array<T> &mask) {
    if (q.shape().size() != 2) throw ShapeError("masked_scaled_attention: q must be [L, D_h]");
    const std::size_t L = q.shape()[0];
    const std::size_t dh = q.shape()[1];
    require_same(mask.shape(), Shape{L, L}, "masked_scaled_attention mask");
    AttentionMask<T> m{mask.reshaped(Shape{1, L, L}), {}};
    auto r = multi_head_attention(q, k, v, kernels::AttentionDims{1, L, 1, dh}, m);
    r.weights.reshape(Shape{L, L});
    return r;
}

template <typename T>
Var<T> masked_mse(const Var<T> &pred, const Array<T> &target, std::span<const std::uint8_t> valid) {
    require_same(pred.shape(), target.shape(), "masked_mse");
    const std::size_t total = pred.value().size();
    if (valid.empty() || total % valid.size() != 0) {
        throw ShapeError("masked_mse: " + std::to_string(valid.size()) + " units do not divide " +
                         std::to_string(total) + " elements");
    }
    const std::size_t unit = total / valid.size();
    std::size_t count = 0;
    double acc = 0.0;
    for (std::size_t u = 0; u < valid.size(); ++u) {
        if (!valid[u]) continue;
        for (std::size_t e = u * unit; e < (u + 1) * unit; ++e) {
            const double d = static_cast<double>(pred.value()[e]) - static_cast<double>(target[e]);
            acc += d * d;
        }
        count += unit;
    }
    if (count == 0) throw std::invalid_argument("masked_mse: no valid units");
    Array<T> y(Shape{1}, static_cast<T>(acc / static_cast<double>(count)));
    require_finite(y, "masked_mse");
    if (!any_requires_grad<T>({&pred})) return Var<T>(std::move(y));
    std::vector<std::uint8_t> keep(valid.begin(), valid.end());
    return Var<T>::make_result(std::move(y), parents_of<T>({&pred}),
                               [target, keep = std::move(keep), unit, count](Node<T> &self) {
                                   Node<T> &pp = *self.parents[0];
                                   Array<T> &g = pp.grad_buffer();
                                   const T scale = T(2) * self.grad[0] / static_cast<T>(count);
                                   for (std::size_t u = 0; u < keep.size(); ++u) {
                                       if (!keep[u]) continue;
                                       for (std::size_t e = u * unit; e < (u + 1) * unit; ++e) {
                                           g[e] += scale * (pp.value[e] - target[e]);
                                       }
                                   }
                               });
}

#define MAIFORMER_INSTANTIATE_OPS(T)                                                                             \
    template Var<T> linear<T>(const Var<T> &, const Var<T> &, const Var<T> &);                                   \
    template Var<T> add<T>(const Var<T> &, const Var<T> &);                                                      \
    template Var<T> mul<T>(const Var<T> &, const Var<T> &);                                                      \
    template Var<T> sum<T>(const Var<T> &);                                                                      \
    template Var<T> reshape<T>(const Var<T> &, Shape);                                                           \
    template Var<T> swap_last_axes<T>(const Var<T> &);                                                           \
    template Var<T> layer_norm<T>(const Var<T> &, const Var<T> &, const Var<T> &, T);                           \
    template Var<T> gelu<T>(const Var<T> &);                                                                     \
    template AttentionResult<T> multi_head_attention<T>(const Var<T> &, const Var<T> &, const Var<T> &,          \
                                                        const kernels::AttentionDims &,                          \
                                                        const AttentionMask<T> &);                               \
    template AttentionResult<T> masked_scaled_attention<T>(const Var<T> &, const Var<T> &, const Var<T> &,       \
                                                           const Array<T> &);                                    \
    template Var<T> masked_mse<T>(const Var<T> &, const Array<T> &, std::span<const std::uint8_t>);

MAIFORMER_INSTANTIATE_OPS(float)
MAIFORMER_INSTANTIATE_OPS(double)

#undef MAIFORMER_INSTANTIATE_OPS

} // namespace maiformer::num
