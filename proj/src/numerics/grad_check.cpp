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

#include "maiformer/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maiformer::num {

namespace {

constexpr double kNormFloor = 1e-6;

double scalar_loss(const std::function<Var<double>()> &loss_fn) {
    const Var<double> loss = loss_fn();
    if (loss.value().size() != 1) throw ShapeError("grad_check: loss must be a scalar");
    return loss.value()[0];
}

} // namespace

GradCheckReport grad_check(const std::function<Var<double>()> &loss_fn, ParameterSet<double> &params, double h,
                           double tolerance) {
    params.zero_grad();
    const Var<double> loss = loss_fn();
    if (loss.value().size() != 1) throw ShapeError("grad_check: loss must be a scalar");
    const double base = loss.value()[0];
    backward(loss);

    if (scalar_loss(loss_fn) != base) {
        throw std::runtime_error("grad_check: loss function is not deterministic (repeated evaluation differs)");
    }

    GradCheckReport report;
    for (auto &p : params.items()) {
        Array<double> &theta = p.var.mutable_value();
        const Array<double> analytic = p.var.grad();
        double diff_sq = 0.0, a_sq = 0.0, n_sq = 0.0, max_abs = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + h;
            const double up = scalar_loss(loss_fn);
            theta[i] = saved - h;
            const double down = scalar_loss(loss_fn);
            theta[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double d = analytic[i] - numeric;
            diff_sq += d * d;
            a_sq += analytic[i] * analytic[i];
            n_sq += numeric * numeric;
            max_abs = std::max(max_abs, std::abs(d));
        }
        // The floor keeps identically-zero gradients (e.g. key biases under
        // softmax) from comparing rounding noise against rounding noise.
        const double scale = std::max({std::sqrt(a_sq), std::sqrt(n_sq), kNormFloor});
        GradCheckEntry entry{p.name, std::sqrt(diff_sq) / scale, max_abs};
        report.max_relative_error = std::max(report.max_relative_error, entry.relative_error);
        report.entries.push_back(entry);
    }
    report.passed = report.max_relative_error < tolerance;
    return report;
}

} // namespace maiformer::num
