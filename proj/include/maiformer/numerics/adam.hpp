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
#include <vector>

#include "maiformer/numerics/parameters.hpp"

namespace maiformer::num {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
    AdamHyper hyper;
    double learning_rate = 1e-4;
    std::uint64_t step = 0;
    std::vector<Array<T>> first_moment;  // one per parameter, same order
    std::vector<Array<T>> second_moment;

    static AdamState for_parameters(const ParameterSet<T> &params, double lr, AdamHyper hyper = {});
};

/// One bias-corrected Adam update using the gradients held by `params`.
/// Throws NumericError (leaving params and state untouched) if any gradient
/// is non-finite.
template <typename T>
void adam_step(ParameterSet<T> &params, AdamState<T> &state);

} // namespace maiformer::num
