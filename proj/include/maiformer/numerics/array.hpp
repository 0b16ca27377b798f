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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace maiformer::num {

using Shape = std::vector<std::size_t>;

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation would produce or consume NaN/Inf values.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::size_t element_count(const Shape &shape);
std::string shape_string(const Shape &shape);

/// Dense row-major array. Precision is fixed by the element type
/// (float for training and inference, double for verification).
template <typename T>
class Array {
public:
    using value_type = T;

    Array() = default;

    explicit Array(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

    Array(Shape shape, std::vector<T> values) : shape_(std::move(shape)), data_(std::move(values)) {
        if (data_.size() != element_count(shape_)) {
            throw ShapeError("Array: " + std::to_string(data_.size()) + " values do not fill shape " +
                             shape_string(shape_));
        }
    }

    const Shape &shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T *data() { return data_.data(); }
    const T *data() const { return data_.data(); }
    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    const std::vector<T> &storage() const { return data_; }

    T &operator[](std::size_t i) { return data_[i]; }
    const T &operator[](std::size_t i) const { return data_[i]; }

    T &operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const T &operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    T &operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const T &operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    /// Same elements, new shape; element counts must agree.
    void reshape(Shape shape) {
        if (element_count(shape) != data_.size()) {
            throw ShapeError("reshape: cannot view " + shape_string(shape_) + " as " + shape_string(shape));
        }
        shape_ = std::move(shape);
    }

    Array reshaped(Shape shape) const {
        Array out = *this;
        out.reshape(std::move(shape));
        return out;
    }

    bool all_finite() const {
        for (const T &v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    template <typename U>
    Array<U> cast() const {
        std::vector<U> out(data_.begin(), data_.end());
        return Array<U>(shape_, std::move(out));
    }

    bool operator==(const Array &other) const = default;

private:
    Shape shape_;
    std::vector<T> data_;
};

template <typename T>
void require_finite(const Array<T> &a, const char *op) {
    if (!a.all_finite()) throw NumericError(std::string(op) + ": non-finite value produced");
}

} // namespace maiformer::num
