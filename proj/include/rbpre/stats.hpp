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

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbpre/normal.hpp"

namespace rbpre {

inline constexpr double kZ99 = 2.5758293035489;

/// DKW band half-width sqrt(ln(2/delta) / (2N)).
double dkw_halfwidth(std::size_t n, double delta = 0.01);

/// Empirical distribution function (right-continuous).
class Ecdf {
public:
    explicit Ecdf(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    /// P(X <= x).
    double operator()(double x) const;
    /// P(X < x).
    double left(double x) const;
    /// Smallest sample value v with F(v) >= p, p in (0,1].
    double quantile(double p) const;
    double dkw_halfwidth(double delta = 0.01) const { return rbpre::dkw_halfwidth(size(), delta); }

private:
    std::vector<double> values_;
};

using Cdf = std::function<double(double)>;

/// sup_x |F_hat(x) - F(x)|, checked at both one-sided limits of every
/// sample point. `cdf_left` (x -> F(x-)) defaults to `cdf`, which is exact
/// for continuous references. Throws InsufficientSamples on empty input.
double ks_distance(const Ecdf& ecdf, const Cdf& cdf, const Cdf& cdf_left = {});
double ks_distance(const Ecdf& a, const Ecdf& b);
/// Against a tabulated CDF, linearly interpolated between abscissae and
/// clamped outside them.
double ks_distance(const Ecdf& ecdf, std::span<const double> abscissae, std::span<const double> values);

struct TailFit {
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};

/// OLS of log(survival) on log(abscissa). Entries with zero survival are
/// dropped; fewer than 5 remaining (or constant abscissae) is an error.
TailFit tail_index_fit(std::span<const double> abscissae, std::span<const double> survival);

struct Estimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Passes iff every consecutive pair is nonincreasing or has overlapping
/// intervals. Needs at least 3 points.
bool trend_monotone(std::span<const Estimate> ladder);

/// Mean with a normal-approximation interval.
Estimate mean_ci(std::span<const double> sample, double z = kZ99);

/// Sample p-quantile with a distribution-free order-statistic interval.
Estimate quantile_ci(std::vector<double> sample, double p, double z = kZ99);

/// One line of a comparison report.
struct ReportRow {
    std::string scenario;
    std::string theorem;
    int n = 0;
    int k = 0;
    int r = 0;
    double t = 0.0;
    std::size_t accepted = 0;
    std::string statistic;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string reference;
    bool pass = false;
};

} // namespace rbpre
