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

#include "doctest.h"

#include <cmath>
#include <limits>

#include "rbpre/errors.hpp"
#include "rbpre/rng.hpp"
#include "rbpre/stats.hpp"
#include "rbpre/walk.hpp"

using namespace rbpre;

TEST_CASE("empirical distribution function")
{
    const Ecdf e({3.0, 1.0, 2.0, 2.0});
    CHECK(e(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(e(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(e(2.0) == 0.75);
    CHECK(e.left(2.0) == 0.25);
    CHECK(e(1.5) == 0.25);
    CHECK(e.quantile(0.5) == 2.0);
    CHECK(e.quantile(1.0) == 3.0);
    CHECK(e.values()[0] == 1.0);
    CHECK(e.dkw_halfwidth() == doctest::Approx(std::sqrt(std::log(2.0 / 0.01) / 8.0)));
    CHECK(dkw_halfwidth(1000, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)));
}

TEST_CASE("Kolmogorov-Smirnov distance")
{
    const Ecdf zero({0.0});
    const Cdf atom = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
    const Cdf atom_left = [](double x) { return x > 0.0 ? 1.0 : 0.0; };
    CHECK(ks_distance(zero, atom, atom_left) == 0.0);
    // Treating the atom as continuous charges the full jump at the left limit.
    CHECK(ks_distance(zero, atom) == 1.0);
    // A continuous reference sees the full jump at both one-sided limits.
    CHECK(ks_distance(Ecdf({0.0}), [](double x) { return 0.5 + 0.0 * x; }) == doctest::Approx(0.5));

    const Ecdf a({0.1, 0.4, 0.4, 0.9, 1.3});
    CHECK(ks_distance(a, a) == 0.0);
    CHECK(ks_distance(a, [&](double x) { return a(x); }, [&](double x) { return a.left(x); }) == 0.0);

    Rng rng = Rng::for_trial(1, Stream::kGeneric, 0);
    std::vector<double> n1(100'000), n2(3000), n3(5000);
    for (auto& v : n1) v = rng.normal();
    for (auto& v : n2) v = rng.normal() + 0.1;
    for (auto& v : n3) v = 1.2 * rng.normal();
    const Ecdf e1(n1), e2(n2), e3(n3);
    CHECK(ks_distance(e1, [](double x) { return normal_cdf(x); }) <= 0.01);
    CHECK(ks_distance(e2, e3) == ks_distance(e3, e2));
    CHECK(ks_distance(e1, e3) <= ks_distance(e1, e2) + ks_distance(e2, e3) + 1e-12);

    std::vector<double> abscissae{-1.0, 0.0, 1.0}, values{0.0, 0.5, 1.0};
    CHECK(ks_distance(Ecdf({-2.0, 2.0}), abscissae, values) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_distance(Ecdf(std::vector<double>{}), atom), InsufficientSamples);
}

TEST_CASE("tail index regression")
{
    std::vector<double> x, half, inv;
    for (int i = 0; i < 20; ++i) {
        x.push_back(10.0 * std::pow(1000.0, i / 19.0));
        half.push_back(std::pow(x.back(), -0.5));
        inv.push_back(7.0 / x.back());
    }
    CHECK(std::abs(tail_index_fit(x, half).exponent + 0.5) < 1e-12);
    CHECK(std::abs(tail_index_fit(x, inv).exponent + 1.0) < 1e-12);
    CHECK_THROWS_AS(tail_index_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}), DomainError);
    CHECK_THROWS_AS(tail_index_fit(std::vector<double>(6, 2.0), std::vector<double>(6, 0.5)), DomainError);

    std::vector<int> at;
    for (double v : x) at.push_back(static_cast<int>(v));
    std::vector<double> ax(at.begin(), at.end());
    const auto tail = ladder_epoch_tail(StableSpec::preset(2.0), Direction::kAscending, at, 40'000, 4);
    CHECK(std::abs(tail_index_fit(ax, tail).exponent + 0.5) <= 0.1);
}

TEST_CASE("trend check")
{
    const double tiny = 1e-6;
    auto est = [&](double v, double h) { return Estimate{v, v - h, v + h}; };
    const std::vector<Estimate> down{est(0.3, tiny), est(0.2, tiny), est(0.1, tiny)};
    const std::vector<Estimate> up{est(0.1, tiny), est(0.3, tiny), est(0.2, tiny)};
    const std::vector<Estimate> overlap{est(0.20, 0.05), est(0.22, 0.05), est(0.15, 0.05)};
    CHECK(trend_monotone(down));
    CHECK_FALSE(trend_monotone(up));
    CHECK(trend_monotone(overlap));
    CHECK_THROWS(trend_monotone(std::vector<Estimate>{est(0.1, 0.0), est(0.2, 0.0)}));
}

TEST_CASE("interval estimates")
{
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) v.push_back(i);
    const auto m = mean_ci(v);
    CHECK(m.value == doctest::Approx(500.5));
    CHECK(m.ci_low < 500.5);
    CHECK(m.ci_high > 500.5);
    const auto q = quantile_ci(v, 0.95);
    CHECK(q.value == 950.0);
    CHECK(q.ci_low <= 950.0);
    CHECK(q.ci_high >= 950.0);
    CHECK(q.ci_high - q.ci_low < 40.0);
}
