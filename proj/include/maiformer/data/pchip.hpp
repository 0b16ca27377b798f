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

#include <span>
#include <vector>

#include "maiformer/data/raw_track.hpp"

namespace maiformer::data {

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes,
/// three-point endpoint slopes with a monotonicity clamp). Two knots give
/// the straight line through them.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y);

    /// x must lie in [front, back]; no extrapolation.
    double operator()(double x) const;

    const std::vector<double> &slopes() const { return d_; }

private:
    std::vector<double> x_, y_, d_;
};

/// Samples every variate at the multiples of `interval` inside the track's
/// time span. The result may be empty when the span contains no grid time.
ResampledTrack pchip_resample(const RawTrack &track, double interval = kResampleInterval);

} // namespace maiformer::data
