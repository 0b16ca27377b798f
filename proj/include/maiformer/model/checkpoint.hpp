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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "maiformer/data/normalizer.hpp"
#include "maiformer/model/config.hpp"
#include "maiformer/numerics/adam.hpp"

namespace maiformer::model {

// Binary layout, all integers and floats little-endian:
//   "MAIFCKPT"  u32 version  u32 element bytes (4 or 8)
//   u64 n  n bytes of JSON header {config, norm_stats, optimizer, meta}
//   u64 count, then per array: u32 name length, name, u32 rank, u64 extents,
//                              raw elements
//   u64 FNV-1a 64 of every preceding byte
// Arrays are the weights ("w/<name>") and, if present, the Adam moments
// ("m/<name>", "v/<name>").
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    enum class Kind { io, version_mismatch, corrupt, precision_mismatch };
    CheckpointError(Kind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

template <typename T>
struct Checkpoint {
    ModelConfig config;
    std::optional<data::NormStats> norm_stats;
    num::ParameterSet<T> weights;
    std::optional<num::AdamState<T>> optimizer;
    nlohmann::json meta = nlohmann::json::object(); // training metadata (epoch, best validation loss, ...)
};

template <typename T>
void save_checkpoint(const std::filesystem::path &path, const Checkpoint<T> &ckpt);

/// Verifies magic, version, checksum and element width.
template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path &path);

/// Header JSON and element width without materializing arrays (checksum still verified).
struct CheckpointInfo {
    std::uint32_t version = 0;
    std::uint32_t element_bytes = 0;
    nlohmann::json header;
};
CheckpointInfo inspect_checkpoint(const std::filesystem::path &path);

} // namespace maiformer::model
