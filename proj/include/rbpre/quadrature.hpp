/*
   Copyright 2026 The reduced_bpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "rbpre/errors.hpp"

namespace rbpre {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

// QUADPACK qk15 abscissae/weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. The interval with the
/// largest error estimate is bisected until the summed error falls below
/// max(abs_tol, rel_tol * |I|). Throws QuadratureError if `max_segments` is
/// exhausted first.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-10, int max_segments = 2000)
{
    if (a == b) return {};
    if (a > b) {
        auto r = integrate(f, b, a, abs_tol, rel_tol, max_segments);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    double total = first.value;
    double error = first.error;
    heap.push(first);
    int evaluations = 15;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= max_segments) {
            throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                  std::to_string(b) + "], error estimate " + std::to_string(error));
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute the sum to shed accumulated rounding from the running updates.
    double sum = 0.0, err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, evaluations};
}

/// Adaptive integration over consecutive breakpoints; useful for oscillatory
/// integrands where a single initial panel can alias.
template <class F>
QuadratureResult integrate_panels(const F& f, std::span<const double> breaks, double abs_tol = 1e-10,
                                  double rel_tol = 1e-10)
{
    QuadratureResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const auto r = integrate(f, breaks[i], breaks[i + 1], abs_tol / static_cast<double>(breaks.size()), rel_tol);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    }
    return out;
}

/// Trapezoid rule on a tabulated function.
inline double trapezoid(std::span<const double> x, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

/// Piecewise-linear interpolation on an increasing grid, clamped at the ends.
inline double interpolate(std::span<const double> x, std::span<const double> y, double at)
{
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}

} // namespace rbpre
