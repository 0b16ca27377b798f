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

#include "maiformer/numerics/ops.hpp"

namespace maiformer::training {

/// Mean squared error over the elements of valid agents. pred and target are
/// [..., N, S, F] with one validity flag per agent. Throws
/// std::invalid_argument when no agent is valid.
template <typename T>
num::Var<T> mse_loss(const num::Var<T> &pred, const num::Array<T> &target, std::span<const std::uint8_t> valid);

} // namespace maiformer::training
