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


#include "maiformer/model/attention_record.hpp"

#include <stdexcept>

namespace maiformer::model {

namespace {

void check_indices(const AttentionRecord &r, std::size_t layer, std::optional<std::size_t> head, std::size_t scene,
                   std::size_t agent) {
    if (layer >= r.layers()) throw std::out_of_range("attention: layer " + std::to_string(layer) + " out of range");
    if (head && *head >= r.heads) throw std::out_of_range("attention: head " + std::to_string(*head) + " out of range");
    if (scene >= r.batch) throw std::out_of_range("attention: scene index " + std::to_string(scene) + " out of range");
    if (agent >= r.agents) throw std::out_of_range("attention: agent " + std::to_string(agent) + " out of range");
    if (!r.validity[scene * r.agents + agent]) {
        throw std::invalid_argument("attention: agent " + std::to_string(agent) + " is padding");
    }
}

} // namespace

std::vector<double> extract_attention(const AttentionRecord &r, std::size_t layer, std::optional<std::size_t> head,
                                      std::size_t scene, std::size_t query_agent) {
    if (r.aa.empty()) throw std::invalid_argument("attention: model has no agent attention");
    check_indices(r, layer, head, scene, query_agent);
    const std::size_t n = r.agents;
    const num::Array<double> &w = r.aa[layer];
    std::vector<double> out(n, 0.0);
    const std::size_t h0 = head ? *head : 0;
    const std::size_t h1 = head ? *head + 1 : r.heads;
    for (std::size_t h = h0; h < h1; ++h) {
        const double *row = w.data() + ((scene * r.heads + h) * n + query_agent) * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += row[j];
    }
    const double count = static_cast<double>(h1 - h0);
    for (double &v : out) v /= count;
    return out;
}

num::Array<double> mma_block(const AttentionRecord &r, std::size_t layer, std::optional<std::size_t> head,
                             std::size_t scene, std::size_t agent) {
    check_indices(r, layer, head, scene, agent);
    const std::size_t f = r.variates;
    const std::size_t l = r.agents * f;
    const num::Array<double> &w = r.mma[layer];
    num::Array<double> out(num::Shape{f, f});
    const std::size_t h0 = head ? *head : 0;
    const std::size_t h1 = head ? *head + 1 : r.heads;
    for (std::size_t h = h0; h < h1; ++h) {
        for (std::size_t i = 0; i < f; ++i) {
            const double *row = w.data() + ((scene * r.heads + h) * l + agent * f + i) * l + agent * f;
            for (std::size_t j = 0; j < f; ++j) out(i, j) += row[j];
        }
    }
    for (auto &v : out.values()) v /= static_cast<double>(h1 - h0);
    return out;
}

} // namespace maiformer::model
