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


#include "maiformer/model/weights.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace maiformer::model {

namespace {

void add_affine(std::vector<WeightSpec> &out, const std::string &prefix, std::size_t in, std::size_t outw) {
    out.push_back({prefix + ".weight", {in, outw}, WeightSpec::Init::uniform_fan_in});
    out.push_back({prefix + ".bias", {outw}, WeightSpec::Init::zeros});
}

void add_norm(std::vector<WeightSpec> &out, const std::string &prefix, std::size_t width) {
    out.push_back({prefix + ".gain", {width}, WeightSpec::Init::ones});
    out.push_back({prefix + ".offset", {width}, WeightSpec::Init::zeros});
}

} // namespace

std::vector<WeightSpec> weight_layout(const ModelConfig &c) {
    c.validate();
    std::vector<WeightSpec> out;
    add_affine(out, "embed", c.past_steps, c.d_model);
    for (std::size_t l = 0; l < c.layers; ++l) {
        const std::string p = "layers." + std::to_string(l);
        add_norm(out, p + ".mma_norm", c.d_model);
        for (const char *r : {"q", "k", "v", "out"}) add_affine(out, p + ".mma." + r, c.d_model, c.d_model);
        if (c.agent_attention) {
            add_norm(out, p + ".aa_norm", c.agent_width());
            for (const char *r : {"q", "k", "v", "out"}) {
                add_affine(out, p + ".aa." + r, c.agent_width(), c.agent_width());
            }
        }
        add_norm(out, p + ".ffn_norm", c.d_model);
        add_affine(out, p + ".ffn.fc1", c.d_model, c.ffn_hidden);
        add_affine(out, p + ".ffn.fc2", c.ffn_hidden, c.d_model);
    }
    std::size_t width = c.d_model;
    for (std::size_t i = 0; i < c.decoder_widths.size(); ++i) {
        add_affine(out, "decoder.hidden." + std::to_string(i), width, c.decoder_widths[i]);
        width = c.decoder_widths[i];
    }
    add_affine(out, "decoder.out", width, c.future_steps);
    return out;
}

template <typename T>
num::ParameterSet<T> init_weights(const ModelConfig &config, std::uint64_t seed) {
    num::ParameterSet<T> params;
    std::mt19937_64 rng(seed);
    for (const WeightSpec &spec : weight_layout(config)) {
        num::Array<T> a(spec.shape);
        switch (spec.init) {
        case WeightSpec::Init::zeros:
            break;
        case WeightSpec::Init::ones:
            a.fill(T(1));
            break;
        case WeightSpec::Init::uniform_fan_in: {
            const double bound = 1.0 / std::sqrt(static_cast<double>(spec.shape[0]));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (auto &v : a.values()) v = static_cast<T>(u(rng));
            break;
        }
        }
        params.add(spec.name, std::move(a));
    }
    return params;
}

template <typename T>
void check_weights(const ModelConfig &config, const num::ParameterSet<T> &weights) {
    const auto layout = weight_layout(config);
    if (layout.size() != weights.size()) {
        throw std::invalid_argument("weights: expected " + std::to_string(layout.size()) + " arrays, got " +
                                    std::to_string(weights.size()));
    }
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto &p = weights.items()[i];
        if (p.name != layout[i].name) {
            throw std::invalid_argument("weights: expected '" + layout[i].name + "' at position " + std::to_string(i) +
                                        ", found '" + p.name + "'");
        }
        if (p.var.shape() != layout[i].shape) {
            throw std::invalid_argument("weights: '" + p.name + "' has shape " + num::shape_string(p.var.shape()) +
                                        ", expected " + num::shape_string(layout[i].shape));
        }
    }
}

template <typename To, typename From>
num::ParameterSet<To> convert_weights(const num::ParameterSet<From> &weights) {
    num::ParameterSet<To> out;
    for (const auto &p : weights.items()) out.add(p.name, p.var.value().template cast<To>());
    return out;
}

template num::ParameterSet<float> init_weights<float>(const ModelConfig &, std::uint64_t);
template num::ParameterSet<double> init_weights<double>(const ModelConfig &, std::uint64_t);
template void check_weights<float>(const ModelConfig &, const num::ParameterSet<float> &);
template void check_weights<double>(const ModelConfig &, const num::ParameterSet<double> &);
template num::ParameterSet<float> convert_weights<float, double>(const num::ParameterSet<double> &);
template num::ParameterSet<double> convert_weights<double, float>(const num::ParameterSet<float> &);
template num::ParameterSet<float> convert_weights<float, float>(const num::ParameterSet<float> &);
template num::ParameterSet<double> convert_weights<double, double>(const num::ParameterSet<double> &);

} // namespace maiformer::model
