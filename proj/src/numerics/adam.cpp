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

#include "maiformer/numerics/adam.hpp"

#include <cmath>

namespace maiformer::num {

template <typename T>
AdamState<T> AdamState<T>::for_parameters(const ParameterSet<T> &params, double lr, AdamHyper hyper) {
    AdamState state;
    state.hyper = hyper;
    state.learning_rate = lr;
    for (const auto &p : params.items()) {
        state.first_moment.emplace_back(p.var.value().shape());
        state.second_moment.emplace_back(p.var.value().shape());
    }
    return state;
}

template <typename T>
void adam_step(ParameterSet<T> &params, AdamState<T> &state) {
    auto &items = params.items();
    if (state.first_moment.size() != items.size() || state.second_moment.size() != items.size()) {
        throw ShapeError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                         " parameters, model has " + std::to_string(items.size()));
    }
    for (std::size_t p = 0; p < items.size(); ++p) {
        const Array<T> &g = items[p].var.grad();
        if (g.shape() != items[p].var.value().shape() || state.first_moment[p].shape() != g.shape()) {
            throw ShapeError("adam_step: shape mismatch for " + items[p].name);
        }
        if (!g.all_finite()) throw NumericError("adam_step: non-finite gradient in " + items[p].name);
    }

    state.step += 1;
    const double b1 = state.hyper.beta1;
    const double b2 = state.hyper.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const double lr = state.learning_rate;
    const double eps = state.hyper.epsilon;

    for (std::size_t p = 0; p < items.size(); ++p) {
        Array<T> &theta = items[p].var.mutable_value();
        const Array<T> &g = items[p].var.grad();
        Array<T> &m = state.first_moment[p];
        Array<T> &v = state.second_moment[p];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = static_cast<double>(g[i]);
            const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
            const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double update = lr * (mi / c1) / (std::sqrt(vi / c2) + eps);
            theta[i] = static_cast<T>(static_cast<double>(theta[i]) - update);
        }
    }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(ParameterSet<float> &, AdamState<float> &);
template void adam_step<double>(ParameterSet<double> &, AdamState<double> &);

} // namespace maiformer::num
