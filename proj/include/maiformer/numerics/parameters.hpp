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
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "maiformer/numerics/autograd.hpp"

namespace maiformer::num {

template <typename T>
struct Parameter {
    std::string name;
    Var<T> var;
};

/// Ordered collection of uniquely named trainable arrays.
template <typename T>
class ParameterSet {
public:
    Var<T> &add(const std::string &name, Array<T> value) {
        if (index_.contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
        index_.emplace(name, items_.size());
        items_.push_back(Parameter<T>{name, Var<T>(std::move(value), true)});
        return items_.back().var;
    }

    bool contains(const std::string &name) const { return index_.contains(name); }

    const Var<T> &get(const std::string &name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
        return items_[it->second].var;
    }
    Var<T> &get(const std::string &name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
        return items_[it->second].var;
    }

    std::deque<Parameter<T>> &items() { return items_; }
    const std::deque<Parameter<T>> &items() const { return items_; }
    std::size_t size() const { return items_.size(); }

    std::size_t element_total() const {
        std::size_t n = 0;
        for (const auto &p : items_) n += p.var.value().size();
        return n;
    }

    void zero_grad() {
        for (auto &p : items_) p.var.zero_grad();
    }

    /// Deep copy: fresh nodes holding the same values.
    ParameterSet clone() const {
        ParameterSet out;
        for (const auto &p : items_) out.add(p.name, p.var.value());
        return out;
    }

private:
    std::deque<Parameter<T>> items_; // deque keeps references from add() valid
    std::map<std::string, std::size_t> index_;
};

} // namespace maiformer::num
