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

#include "maiformer/training/loss.hpp"

namespace maiformer::training {

template <typename T>
num::Var<T> mse_loss(const num::Var<T> &pred, const num::Array<T> &target, std::span<const std::uint8_t> valid) {
    return num::masked_mse(pred, target, valid);
}

template num::Var<float> mse_loss(const num::Var<float> &, const num::Array<float> &, std::span<const std::uint8_t>);
template num::Var<double> mse_loss(const num::Var<double> &, const num::Array<double> &,
                                   std::span<const std::uint8_t>);

} // namespace maiformer::training
