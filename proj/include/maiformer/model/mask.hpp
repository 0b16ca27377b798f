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

#include "maiformer/numerics/ops.hpp"

namespace maiformer::model {

/// Additive (N*F)x(N*F) mask over variate tokens: 0 where both tokens belong
/// to the same valid agent, -inf elsewhere.
template <typename T>
struct MaskMatrix {
    num::Array<T> additive;
    std::vector<std::uint8_t> validity; // [N]
};

/// Empty `validity` means every agent is valid.
template <typename T>
MaskMatrix<T> build_mask(std::size_t agents, std::size_t variates, std::vector<std::uint8_t> validity = {});

/// Batched MMA mask [B, N*F, N*F]; padded agents' token rows are inactive.
template <typename T>
num::AttentionMask<T> mma_mask(const std::vector<std::uint8_t> &validity, std::size_t batch, std::size_t agents,
                               std::size_t variates);

/// Batched AA mask [B, N, N]: every query may look at valid keys only.
template <typename T>
num::AttentionMask<T> agent_mask(const std::vector<std::uint8_t> &validity, std::size_t batch, std::size_t agents);

} // namespace maiformer::model
