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
#include <string>
#include <utility>
#include <vector>

#include "maiformer/model/config.hpp"
#include "maiformer/numerics/parameters.hpp"

namespace maiformer::model {

struct WeightSpec {
    std::string name;
    num::Shape shape;
    enum class Init { uniform_fan_in, zeros, ones } init = Init::uniform_fan_in;
};

/// Every learnable array the config implies, in a fixed order:
///   embed.{weight,bias}
///   layers.<l>.mma_norm.{gain,offset}, layers.<l>.mma.{q,k,v,out}.{weight,bias}
///   layers.<l>.aa_norm.*, layers.<l>.aa.*        (only with agent attention)
///   layers.<l>.ffn_norm.*, layers.<l>.ffn.{fc1,fc2}.{weight,bias}
///   decoder.hidden.<i>.{weight,bias}, decoder.out.{weight,bias}
std::vector<WeightSpec> weight_layout(const ModelConfig &config);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, unit gains.
template <typename T>
num::ParameterSet<T> init_weights(const ModelConfig &config, std::uint64_t seed);

/// Throws std::invalid_argument if names or shapes differ from the layout.
template <typename T>
void check_weights(const ModelConfig &config, const num::ParameterSet<T> &weights);

template <typename To, typename From>
num::ParameterSet<To> convert_weights(const num::ParameterSet<From> &weights);

} // namespace maiformer::model
