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
#include <optional>
#include <string>
#include <vector>

#include "maiformer/numerics/array.hpp"

namespace maiformer::model {

/// Attention weights captured during one forward pass, stored in double.
struct AttentionRecord {
    std::size_t batch = 0;
    std::size_t agents = 0; // N after padding
    std::size_t variates = 0;
    std::size_t heads = 0;
    std::vector<num::Array<double>> mma; // per layer [B, H, N*F, N*F]
    std::vector<num::Array<double>> aa;  // per layer [B, H, N, N]; empty for the MMA-only model
    std::vector<std::uint8_t> validity;  // [B * N]
    std::vector<std::uint64_t> scene_ids;
    std::vector<std::string> agent_ids; // [B * N], empty strings for padding

    std::size_t layers() const { return mma.size(); }
};

/// Agent-attention row of `query_agent` in scene `scene`: N scores, zero for
/// padded agents. `head` unset averages the heads. Throws std::out_of_range
/// on bad indices and std::invalid_argument for a padded query agent or a
/// record without agent attention.
std::vector<double> extract_attention(const AttentionRecord &record, std::size_t layer,
                                      std::optional<std::size_t> head, std::size_t scene, std::size_t query_agent);

/// The FxF MMA block of one agent ([F, F], rows sum to 1).
num::Array<double> mma_block(const AttentionRecord &record, std::size_t layer, std::optional<std::size_t> head,
                             std::size_t scene, std::size_t agent);

} // namespace maiformer::model
