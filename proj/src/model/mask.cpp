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


#include "maiformer/model/mask.hpp"

#include <limits>
#include <stdexcept>

namespace maiformer::model {

namespace {

void check_validity(const std::vector<std::uint8_t> &validity, std::size_t expected) {
    if (validity.size() != expected) {
        throw num::ShapeError("mask: validity has " + std::to_string(validity.size()) + " entries, expected " +
                              std::to_string(expected));
    }
}

} // namespace

template <typename T>
MaskMatrix<T> build_mask(std::size_t agents, std::size_t variates, std::vector<std::uint8_t> validity) {
    if (agents == 0 || variates == 0) throw std::invalid_argument("build_mask: N and F must be positive");
    if (validity.empty()) validity.assign(agents, 1);
    check_validity(validity, agents);
    const std::size_t n = agents * variates;
    MaskMatrix<T> m{num::Array<T>(num::Shape{n, n}, -std::numeric_limits<T>::infinity()), std::move(validity)};
    for (std::size_t a = 0; a < agents; ++a) {
        if (!m.validity[a]) continue;
        for (std::size_t i = a * variates; i < (a + 1) * variates; ++i)
            for (std::size_t j = a * variates; j < (a + 1) * variates; ++j) m.additive(i, j) = T(0);
    }
    return m;
}

template <typename T>
num::AttentionMask<T> mma_mask(const std::vector<std::uint8_t> &validity, std::size_t batch, std::size_t agents,
                               std::size_t variates) {
    check_validity(validity, batch * agents);
    const std::size_t n = agents * variates;
    num::AttentionMask<T> out{num::Array<T>(num::Shape{batch, n, n}, -std::numeric_limits<T>::infinity()), {}};
    out.row_active.assign(batch * n, 0);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t a = 0; a < agents; ++a) {
            if (!validity[b * agents + a]) continue;
            for (std::size_t i = a * variates; i < (a + 1) * variates; ++i) {
                out.row_active[b * n + i] = 1;
                for (std::size_t j = a * variates; j < (a + 1) * variates; ++j) out.additive(b, i, j) = T(0);
            }
        }
    }
    return out;
}

template <typename T>
num::AttentionMask<T> agent_mask(const std::vector<std::uint8_t> &validity, std::size_t batch, std::size_t agents) {
    check_validity(validity, batch * agents);
    num::AttentionMask<T> out{num::Array<T>(num::Shape{batch, agents, agents}, T(0)), validity};
    for (std::size_t b = 0; b < batch; ++b) {
        bool any = false;
        for (std::size_t j = 0; j < agents; ++j) {
            any = any || validity[b * agents + j];
            if (validity[b * agents + j]) continue;
            for (std::size_t i = 0; i < agents; ++i) out.additive(b, i, j) = -std::numeric_limits<T>::infinity();
        }
        if (!any) throw std::invalid_argument("agent attention: scene " + std::to_string(b) + " has no valid agent");
    }
    return out;
}

template MaskMatrix<float> build_mask<float>(std::size_t, std::size_t, std::vector<std::uint8_t>);
template MaskMatrix<double> build_mask<double>(std::size_t, std::size_t, std::vector<std::uint8_t>);
template num::AttentionMask<float> mma_mask<float>(const std::vector<std::uint8_t> &, std::size_t, std::size_t,
                                                   std::size_t);
template num::AttentionMask<double> mma_mask<double>(const std::vector<std::uint8_t> &, std::size_t, std::size_t,
                                                     std::size_t);
template num::AttentionMask<float> agent_mask<float>(const std::vector<std::uint8_t> &, std::size_t, std::size_t);
template num::AttentionMask<double> agent_mask<double>(const std::vector<std::uint8_t> &, std::size_t, std::size_t);

} // namespace maiformer::model
