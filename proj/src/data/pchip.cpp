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


#include "maiformer/data/pchip.hpp"

#include <algorithm>
#include <cmath>

namespace maiformer::data {

namespace {

bool same_sign(double a, double b) { return (a > 0 && b > 0) || (a < 0 && b < 0); }

double endpoint_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (!same_sign(d, m0)) {
        d = 0.0;
    } else if (!same_sign(m0, m1) && std::abs(d) > std::abs(3.0 * m0)) {
        d = 3.0 * m0;
    }
    return d;
}

} // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DataError("pchip: need at least 2 knots with matching values");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw DataError("pchip: knot abscissae must be strictly increasing");
    }
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!same_sign(m[k - 1], m[k])) continue;
        // Weighted harmonic mean of the neighbouring secants.
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
    }
    d_[0] = endpoint_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

double Pchip::operator()(double x) const {
    if (x < x_.front() || x > x_.back()) throw DataError("pchip: query outside the knot range");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    if (s == 0.0) return y_[i];
    if (s == 1.0) return y_[i + 1];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

ResampledTrack pchip_resample(const RawTrack &track, double interval) {
    validate(track);
    if (!(interval > 0.0)) throw DataError("pchip_resample: interval must be positive");
    const std::size_t n = track.points.size();
    std::vector<double> t(n);
    std::vector<std::vector<double>> cols(kVariates, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const TrackPoint &p = track.points[i];
        t[i] = p.t;
        cols[0][i] = p.lat;
        cols[1][i] = p.lon;
        cols[2][i] = p.alt;
    }
    ResampledTrack out;
    out.flight_id = track.flight_id;
    out.interval = interval;
    const auto first = static_cast<std::int64_t>(std::ceil(t.front() / interval));
    const auto last = static_cast<std::int64_t>(std::floor(t.back() / interval));
    out.start_step = first;
    if (last < first) {
        out.values = num::Array<double>(num::Shape{0, kVariates});
        return out;
    }
    const auto count = static_cast<std::size_t>(last - first + 1);
    out.values = num::Array<double>(num::Shape{count, kVariates});
    for (std::size_t v = 0; v < kVariates; ++v) {
        const Pchip interp(t, cols[v]);
        for (std::size_t k = 0; k < count; ++k) {
            const double tk = static_cast<double>(first + static_cast<std::int64_t>(k)) * interval;
            out.values(k, v) = interp(std::clamp(tk, t.front(), t.back()));
        }
    }
    return out;
}

} // namespace maiformer::data
