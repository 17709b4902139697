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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/quadrature.hpp"
#include "rbpre/stable.hpp"
#include "rbpre/stats.hpp"

using namespace rbpre;

namespace {

std::vector<double> draws(const StableSpec& spec, std::size_t n, std::uint64_t seed)
{
    Rng rng = Rng::for_trial(seed, Stream::kGeneric, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = sample_increment(spec, rng);
    return x;
}

std::complex<double> ecf(const std::vector<double>& x, double w)
{
    std::complex<double> acc = 0.0;
    for (double v : x) acc += std::exp(std::complex<double>(0.0, w * v));
    return acc / static_cast<double>(x.size());
}

} // namespace

TEST_CASE("admissible parameter set")
{
    CHECK_NOTHROW(StableSpec(2.0, 0.0, 0.5));
    CHECK_NOTHROW(StableSpec(1.0, 0.0, 1.0));
    CHECK_NOTHROW(StableSpec(1.5, 0.4, 1.0));
    CHECK_THROWS_AS(StableSpec(2.0, 0.3, 0.5), DomainError);
    CHECK_THROWS_AS(StableSpec(1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(StableSpec(2.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(StableSpec(1.5, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(StableSpec(1.5, 0.0, 0.0), DomainError);
    CHECK(StableSpec::preset(2.0).c() == 0.5);
    CHECK(StableSpec::preset(1.5).c() == 1.0);
}

TEST_CASE("gaussian preset gives standard normal draws")
{
    const auto x = draws(StableSpec::preset(2.0), 1'000'000, 3);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    CHECK(std::abs(mean) < 4e-3);
    CHECK(std::abs(ecf(x, 1.0) - std::exp(-0.5)) < 3.0 / std::sqrt(1e6));
    std::vector<double> head(x.begin(), x.begin() + 100'000);
    CHECK(ks_distance(Ecdf(head), [](double z) { return normal_cdf(z); }) < 0.01);
}

TEST_CASE("empirical characteristic function matches for every preset")
{
    const std::pair<double, double> presets[] = {{1.5, 0.0}, {1.5, 0.4}, {0.8, 0.0}};
    for (auto [a, b] : presets) {
        const auto spec = StableSpec::preset(a, b);
        const auto x = draws(spec, 200'000, 11);
        for (double w : {0.5, 1.0, 2.0}) {
            INFO("alpha=" << a << " beta=" << b << " w=" << w);
            CHECK(std::abs(ecf(x, w) - spec.characteristic(w)) < 3.0 / std::sqrt(2e5));
        }
    }
}

TEST_CASE("symmetric law has median zero")
{
    auto x = draws(StableSpec::preset(0.8), 100'001, 5);
    const auto q = quantile_ci(x, 0.5);
    CHECK(q.ci_low <= 0.0);
    CHECK(q.ci_high >= 0.0);
}

TEST_CASE("density by Fourier inversion")
{
    CHECK(stable_density(StableSpec::preset(2.0), 0.0) == doctest::Approx(0.39894228).epsilon(1e-6));
    CHECK(stable_density(StableSpec::preset(2.0), 1.3) == doctest::Approx(normal_pdf(1.3)).epsilon(1e-6));
    CHECK(stable_density(StableSpec(1.0, 0.0, 1.0), 0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-6));
    const auto s = StableSpec::preset(1.5);
    for (double x : {0.3, 1.0, 4.0}) CHECK(std::abs(stable_density(s, x) - stable_density(s, -x)) < 1e-8);
    for (const auto& spec : {StableSpec::preset(2.0), StableSpec::preset(1.5), StableSpec::preset(1.5, 0.4), StableSpec(1.0, 0.0, 1.0)}) {
        std::vector<double> breaks;
        for (int i = -50; i <= 50; ++i) breaks.push_back(i);
        const double mass = integrate_panels([&](double x) { return stable_density(spec, x); }, breaks, 1e-10, 1e-10).value;
        // Heavy tails: P(|X| > x) ~ C_a c x^{-a}, C_a = (1 - a) / (Gamma(2 - a) cos(pi a / 2)), C_1 = 2 / pi.
        const double a = spec.alpha();
        const double c_a = a == 1.0 ? 2.0 / std::numbers::pi
                                    : (1.0 - a) / (std::tgamma(2.0 - a) * std::cos(std::numbers::pi * a / 2.0));
        const double outside = a < 2.0 ? c_a * spec.c() * std::pow(50.0, -a) : 0.0;
        INFO("alpha=" << spec.alpha());
        CHECK(std::abs(mass + outside - 1.0) < 1e-4);
    }
}

TEST_CASE("positivity parameter")
{
    CHECK(std::abs(positivity_rho(StableSpec::preset(2.0)) - 0.5) < 1e-6);
    CHECK(std::abs(positivity_rho(StableSpec::preset(0.8)) - 0.5) < 1e-6);
    const auto skew = StableSpec::preset(1.5, 0.4);
    CHECK(positivity_rho(skew) == doctest::Approx(0.419).epsilon(2e-3));
    CHECK(std::abs(positivity_rho(skew) - skew.rho()) < 1e-6);

    // Monte Carlo: fraction of positive normalized sums.
    Rng rng = Rng::for_trial(9, Stream::kGeneric, 1);
    int pos = 0;
    const int reps = 200'000;
    for (int i = 0; i < reps; ++i) pos += sample_increment(skew, rng) > 0.0;
    const double frac = static_cast<double>(pos) / reps;
    CHECK(std::abs(frac - skew.rho()) < 4.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("norming sequence")
{
    CHECK(norming(2.0, 100) == doctest::Approx(10.0));
    CHECK(norming(1.0, 7) == doctest::Approx(7.0));
    CHECK(norming(0.5, 4) == doctest::Approx(16.0));
}

TEST_CASE("sample paths")
{
    const auto spec = StableSpec::preset(2.0);
    Rng rng = Rng::for_trial(1, Stream::kGeneric, 2);
    const auto one = sample_path(spec, 1, rng);
    REQUIRE(one.values.size() == 2);
    CHECK(one.values[0] == 0.0);

    std::vector<double> ends;
    for (int i = 0; i < 20'000; ++i) {
        const auto p = sample_path(spec, 200, rng);
        CHECK_FALSE(*std::min_element(p.values.begin(), p.values.end()) > 0.0);
        ends.push_back(p.values.back());
    }
    CHECK(ks_distance(Ecdf(ends), [](double z) { return normal_cdf(z); }) < 0.02);
}

TEST_CASE("min and endpoint ensemble")
{
    const auto ens = min_and_endpoint_sampler(StableSpec::preset(2.0), 1000, 100'000, 4);
    CHECK(ens.exact());
    CHECK(ens.prob_min_le(0.0) == 1.0);
    CHECK(std::abs(ens.prob_min_le(-1.0) - 2.0 * normal_cdf(-1.0)) < 0.01);
    CHECK(ens.joint(-1e300, 0.0, 1e300) == 1.0);

    const auto skel = min_and_endpoint_sampler(StableSpec::preset(1.5), 200, 20'000, 4);
    CHECK_FALSE(skel.exact());
    CHECK(skel.prob_min_le(0.0) == 1.0);
}

TEST_CASE("meander density against the Rayleigh law")
{
    std::vector<double> z;
    for (int i = 1; i <= 120; ++i) z.push_back(0.05 * i);
    MeanderOptions opt;
    opt.length = 1000;
    const auto m = meander_density(StableSpec::preset(2.0), z, 20'000, 8, opt);
    double worst = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(m.density[i] >= 0.0);
        if (z[i] >= 0.1 && z[i] <= 3.0) worst = std::max(worst, std::abs(m.density[i] - z[i] * std::exp(-0.5 * z[i] * z[i])));
    }
    CHECK(worst < 0.02);
    CHECK(std::abs(m.integral() - 1.0) < 0.01);
}

TEST_CASE("batch samplers do not depend on the thread count")
{
    const auto spec = StableSpec::preset(1.5, 0.4);
    const auto a = min_and_endpoint_sampler(spec, 50, 5000, 21, 1);
    const auto b = min_and_endpoint_sampler(spec, 50, 5000, 21, 3);
    CHECK(std::equal(a.minima().begin(), a.minima().end(), b.minima().begin()));
    CHECK(std::equal(a.endpoints().begin(), a.endpoints().end(), b.endpoints().begin()));
}
