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

#include <functional>
#include <string>
#include <vector>

#include "maiformer/numerics/parameters.hpp"

namespace maiformer::num {

struct GradCheckEntry {
    std::string name;
    double relative_error = 0.0; // ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-6)
    double max_abs_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_relative_error = 0.0;
    bool passed = false;
};

/// Compares reverse-mode gradients of a scalar loss against central finite
/// differences (f(x+h) - f(x-h)) / 2h, one element at a time. Runs in double
/// precision only. Throws std::runtime_error if two evaluations of
/// `loss_fn` at the same point disagree.
GradCheckReport grad_check(const std::function<Var<double>()> &loss_fn, ParameterSet<double> &params,
                           double h = 1e-5, double tolerance = 1e-4);

} // namespace maiformer::num
