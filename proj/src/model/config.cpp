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


#include "maiformer/model/config.hpp"

#include <stdexcept>

namespace maiformer::model {

std::string to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

Precision precision_from_string(const std::string &s) {
    if (s == "f32") return Precision::f32;
    if (s == "f64") return Precision::f64;
    throw std::invalid_argument("precision must be f32 or f64, got '" + s + "'");
}

void ModelConfig::validate() const {
    auto positive = [](std::size_t v, const char *name) {
        if (v == 0) throw std::invalid_argument(std::string("model config: ") + name + " must be positive");
    };
    positive(max_agents, "max_agents");
    positive(past_steps, "past_steps");
    positive(future_steps, "future_steps");
    positive(variates, "variates");
    positive(d_model, "d_model");
    positive(layers, "layers");
    positive(heads, "heads");
    positive(ffn_hidden, "ffn_hidden");
    if (d_model < 2) throw std::invalid_argument("model config: d_model must be at least 2");
    if (d_model % heads != 0) throw std::invalid_argument("model config: d_model not divisible by heads");
    if (agent_width() % heads != 0) {
        throw std::invalid_argument("model config: variates * d_model not divisible by heads");
    }
    for (std::size_t w : decoder_widths) positive(w, "decoder width");
}

ModelConfig mma_only(ModelConfig base) {
    base.agent_attention = false;
    return base;
}

nlohmann::json to_json(const ModelConfig &c) {
    return {{"max_agents", c.max_agents},     {"past_steps", c.past_steps},
            {"future_steps", c.future_steps}, {"variates", c.variates},
            {"d_model", c.d_model},           {"layers", c.layers},
            {"heads", c.heads},               {"ffn_hidden", c.ffn_hidden},
            {"decoder_widths", c.decoder_widths}, {"agent_attention", c.agent_attention},
            {"mma_residual", c.mma_residual}, {"precision", to_string(c.precision)}};
}

ModelConfig model_config_from_json(const nlohmann::json &j, ModelConfig c) {
    static const char *const known[] = {"max_agents", "past_steps", "future_steps", "variates",
                                        "d_model",    "layers",     "heads",        "ffn_hidden",
                                        "decoder_widths", "agent_attention", "mma_residual", "precision"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char *k : known) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("model config: unknown key '" + it.key() + "'");
    }
    auto take = [&](const char *key, auto &field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("max_agents", c.max_agents);
    take("past_steps", c.past_steps);
    take("future_steps", c.future_steps);
    take("variates", c.variates);
    take("d_model", c.d_model);
    take("layers", c.layers);
    take("heads", c.heads);
    take("ffn_hidden", c.ffn_hidden);
    take("decoder_widths", c.decoder_widths);
    take("agent_attention", c.agent_attention);
    take("mma_residual", c.mma_residual);
    if (j.contains("precision")) c.precision = precision_from_string(j.at("precision").get<std::string>());
    c.validate();
    return c;
}

} // namespace maiformer::model
