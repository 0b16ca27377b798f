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

// Reverse-mode differentiation over the small op set the model needs.
// A Var is a shared handle to a graph node; ops record their parents and a
// backward closure only when at least one input requires a gradient.

#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "maiformer/numerics/array.hpp"

namespace maiformer::num {

template <typename T>
struct Node {
    Array<T> value;
    Array<T> grad; // empty until the first accumulation
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node &)> backward_fn;

    Array<T> &grad_buffer() {
        if (grad.empty() && !value.empty()) grad = Array<T>(value.shape());
        return grad;
    }
};

template <typename T>
class Var {
public:
    Var() = default;
    explicit Var(Array<T> value, bool requires_grad = false) : node_(std::make_shared<Node<T>>()) {
        node_->value = std::move(value);
        node_->requires_grad = requires_grad;
    }

    bool defined() const { return node_ != nullptr; }
    const Array<T> &value() const { return node_->value; }
    Array<T> &mutable_value() { return node_->value; }
    const Shape &shape() const { return node_->value.shape(); }
    bool requires_grad() const { return node_ && node_->requires_grad; }

    /// Gradient accumulated by backward(); zeros if nothing flowed here.
    const Array<T> &grad() const { return node_->grad_buffer(); }
    Array<T> &mutable_grad() { return node_->grad_buffer(); }
    void zero_grad() {
        if (!node_->grad.empty()) node_->grad.fill(T(0));
    }

    const std::shared_ptr<Node<T>> &node() const { return node_; }

    /// Builds a result node wired to its parents.
    static Var make_result(Array<T> value, std::vector<std::shared_ptr<Node<T>>> parents,
                           std::function<void(Node<T> &)> backward_fn) {
        Var out(std::move(value), true);
        out.node_->parents = std::move(parents);
        out.node_->backward_fn = std::move(backward_fn);
        return out;
    }

private:
    std::shared_ptr<Node<T>> node_;
};

namespace detail {
inline thread_local bool grad_recording = true;
} // namespace detail

/// While alive, ops on this thread build no graph (inference mode).
class NoGradGuard {
public:
    NoGradGuard() : saved_(detail::grad_recording) { detail::grad_recording = false; }
    ~NoGradGuard() { detail::grad_recording = saved_; }
    NoGradGuard(const NoGradGuard &) = delete;
    NoGradGuard &operator=(const NoGradGuard &) = delete;

private:
    bool saved_;
};

template <typename T>
bool any_requires_grad(std::initializer_list<const Var<T> *> vars) {
    if (!detail::grad_recording) return false;
    for (const Var<T> *v : vars) {
        if (v != nullptr && v->defined() && v->requires_grad()) return true;
    }
    return false;
}

/// Propagates `seed` (same shape as root) back through the graph that
/// produced `root`, accumulating into every reachable node's gradient.
template <typename T>
void backward(const Var<T> &root, const Array<T> &seed) {
    if (seed.shape() != root.shape()) {
        throw ShapeError("backward: seed shape " + shape_string(seed.shape()) + " does not match root " +
                         shape_string(root.shape()));
    }
    // Iterative post-order DFS gives a topological order.
    std::vector<Node<T> *> order;
    std::unordered_set<Node<T> *> seen;
    std::vector<std::pair<Node<T> *, std::size_t>> stack;
    stack.emplace_back(root.node().get(), 0);
    seen.insert(root.node().get());
    while (!stack.empty()) {
        auto &[node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T> *p = node->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    Array<T> &g = root.node()->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += seed[i];
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T> *n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
}

/// Scalar root: seeds with 1.
template <typename T>
void backward(const Var<T> &root) {
    if (root.value().size() != 1) throw ShapeError("backward: implicit seed needs a scalar root");
    backward(root, Array<T>(root.shape(), T(1)));
}

} // namespace maiformer::num
