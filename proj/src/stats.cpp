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

#include "rbpre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbpre/errors.hpp"
#include "rbpre/quadrature.hpp"

namespace rbpre {

double dkw_halfwidth(std::size_t n, double delta)
{
    if (n == 0) throw InsufficientSamples("DKW band of an empty sample");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

Ecdf::Ecdf(std::vector<double> values) : values_(std::move(values))
{
    if (std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); }))
        throw DomainError("ecdf sample contains NaN");
    std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double x) const
{
    if (values_.empty()) throw InsufficientSamples("empty ecdf");
    return static_cast<double>(std::upper_bound(values_.begin(), values_.end(), x) - values_.begin()) /
           static_cast<double>(values_.size());
}

double Ecdf::left(double x) const
{
    if (values_.empty()) throw InsufficientSamples("empty ecdf");
    return static_cast<double>(std::lower_bound(values_.begin(), values_.end(), x) - values_.begin()) /
           static_cast<double>(values_.size());
}

double Ecdf::quantile(double p) const
{
    if (values_.empty()) throw InsufficientSamples("empty ecdf");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in (0,1]");
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values_.size()))) - 1;
    return values_[std::min(idx, values_.size() - 1)];
}

double ks_distance(const Ecdf& ecdf, const Cdf& cdf, const Cdf& cdf_left)
{
    if (ecdf.size() == 0) throw InsufficientSamples("ks_distance of an empty sample");
    const auto v = ecdf.values();
    const auto n = static_cast<double>(v.size());
    const Cdf& left = cdf_left ? cdf_left : cdf;
    double d = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double below = static_cast<double>(i) / n;
        const double at = static_cast<double>(j) / n;
        d = std::max({d, std::abs(at - cdf(v[i])), std::abs(below - left(v[i]))});
        i = j;
    }
    return d;
}

double ks_distance(const Ecdf& a, const Ecdf& b)
{
    if (a.size() == 0 || b.size() == 0) throw InsufficientSamples("ks_distance of an empty sample");
    double d = 0.0;
    for (const Ecdf* e : {&a, &b}) {
        for (double x : e->values()) d = std::max(d, std::abs(a(x) - b(x)));
    }
    return d;
}

double ks_distance(const Ecdf& ecdf, std::span<const double> abscissae, std::span<const double> values)
{
    if (abscissae.empty() || abscissae.size() != values.size()) throw DomainError("malformed reference table");
    return ks_distance(ecdf, [&](double x) { return interpolate(abscissae, values, x); });
}

TailFit tail_index_fit(std::span<const double> abscissae, std::span<const double> survival)
{
    if (abscissae.size() != survival.size()) throw DomainError("tail fit needs matching columns");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < abscissae.size(); ++i) {
        if (survival[i] > 0.0 && abscissae[i] > 0.0) {
            lx.push_back(std::log(abscissae[i]));
            ly.push_back(std::log(survival[i]));
        }
    }
    const auto m = lx.size();
    if (m < 5) throw DomainError("tail fit needs at least 5 abscissae with positive survival");
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(m);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) throw DomainError("tail fit abscissae are degenerate");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ly[i] - intercept - slope * lx[i];
        sse += r * r;
    }
    return {slope, std::sqrt(sse / static_cast<double>(m - 2) / sxx), intercept};
}

bool trend_monotone(std::span<const Estimate> ladder)
{
    if (ladder.size() < 3) throw DomainError("trend check needs at least 3 ladder points");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        const auto& a = ladder[i - 1];
        const auto& b = ladder[i];
        const bool decreasing = b.value <= a.value;
        const bool overlap = b.ci_low <= a.ci_high && a.ci_low <= b.ci_high;
        if (!decreasing && !overlap) return false;
    }
    return true;
}

Estimate mean_ci(std::span<const double> sample, double z)
{
    if (sample.size() < 2) throw InsufficientSamples("mean_ci needs at least 2 values");
    const auto n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    const double half = z * std::sqrt(var / (n - 1.0) / n);
    return {mean, mean - half, mean + half};
}

Estimate quantile_ci(std::vector<double> sample, double p, double z)
{
    if (sample.empty()) throw InsufficientSamples("quantile_ci of an empty sample");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0,1)");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    auto at = [&](double rank) {
        const auto i = static_cast<std::ptrdiff_t>(std::clamp(std::ceil(rank), 1.0, n)) - 1;
        return sample[static_cast<std::size_t>(i)];
    };
    const double half = z * std::sqrt(n * p * (1.0 - p));
    return {at(n * p), at(n * p - half), at(n * p + half + 1.0)};
}

} // namespace rbpre
