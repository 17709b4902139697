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
#include <sstream>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/quadrature.hpp"
#include "rbpre/stats.hpp"
#include "rbpre/walk.hpp"

using namespace rbpre;

namespace {

const RenewalTable& gaussian_table()
{
    static const RenewalTable table = renewal_for(StableSpec::preset(2.0), 40.0, 4000, 17);
    return table;
}

} // namespace

TEST_CASE("walk paths")
{
    Rng rng = Rng::for_trial(1, Stream::kGeneric, 0);
    const auto empty = simulate_walk(StableSpec::preset(2.0), 0, rng);
    CHECK(empty.prefix == std::vector<double>{0.0});

    const auto p = simulate_walk(StableSpec::preset(1.5), 500, rng);
    double sum = 0.0;
    for (double x : p.increments) sum += x;
    CHECK(p.prefix.back() == doctest::Approx(sum).epsilon(1e-12));

    std::vector<double> ends;
    for (int i = 0; i < 10'000; ++i) ends.push_back(simulate_walk(StableSpec::preset(2.0), 10'000, rng).back() / 100.0);
    CHECK(ks_distance(Ecdf(ends), [](double z) { return normal_cdf(z); }) <= 0.02);
}

TEST_CASE("window minimum, first argmin and maximum")
{
    const auto p = WalkPath::from_increments({1.0, -1.5, 2.5});
    const auto s = min_stats(p, 0);
    CHECK(s.min == doctest::Approx(-0.5));
    CHECK(s.argmin == 2);
    CHECK(s.max == doctest::Approx(2.0));
    const auto last = min_stats(p, 3);
    CHECK(last.min == doctest::Approx(2.0));
    CHECK(last.argmin == 3);
    const auto up = min_stats(WalkPath::from_increments({1.0, 1.0, 1.0}), 0);
    CHECK(up.argmin == 0);
    CHECK(up.min == 0.0);
    // Ties: the first index attaining the minimum.
    CHECK(min_stats(WalkPath::from_increments({-1.0, 1.0, -1.0}), 0).argmin == 1);
    CHECK_THROWS_AS(min_stats(p, 4), DomainError);
}

TEST_CASE("ladder decomposition")
{
    const auto l = ladder_decompose(WalkPath::from_increments({-1.0, 0.5, -1.5}));
    CHECK(l.weak_desc_epochs == std::vector<int>{1, 3});
    REQUIRE(l.desc_heights.size() == 2);
    CHECK(l.desc_heights[0] == doctest::Approx(1.0));
    CHECK(l.desc_heights[1] == doctest::Approx(2.0));

    CHECK(ladder_decompose(WalkPath::from_increments({1.0, 2.0, 0.5})).weak_desc_epochs.empty());

    const auto ties = ladder_decompose(WalkPath::from_increments({1.0, -1.0, 1.0, 1.0}));
    CHECK(ties.weak_asc_epochs == std::vector<int>{1, 3, 4});
    CHECK(ties.strict_asc_epochs() == std::vector<int>{1, 4});

    const auto s = sample_ladder_heights(StableSpec::preset(1.5), 5.0, 2000, 3);
    CHECK(s.zeta() == 0.0);
}

TEST_CASE("renewal functions")
{
    const auto& t = gaussian_table();
    CHECK(t.plus_at(0.0) == doctest::Approx(1.0));
    CHECK(t.minus_at(0.0) == doctest::Approx(1.0));
    for (std::size_t i = 1; i < t.grid().size(); ++i) {
        CHECK(t.v_plus()[i] >= t.v_plus()[i - 1]);
        CHECK(t.v_minus()[i] >= t.v_minus()[i - 1]);
    }
    std::vector<double> x, v;
    for (std::size_t i = 0; i < t.grid().size(); ++i) {
        if (t.grid()[i] >= 4.0) {
            x.push_back(t.grid()[i]);
            v.push_back(t.v_plus()[i]);
        }
    }
    CHECK(std::abs(tail_index_fit(x, v).exponent - 1.0) <= 0.1);
    CHECK(t.plus_at(-1.0) == 0.0);

    const auto ratio = asympv_ratio(t, 0.9 * t.max(), 1.0);
    CHECK(ratio >= 0.95);
    CHECK(ratio <= 1.05);
    CHECK(std::isfinite(asympv_ratio(t, t.grid()[1], 1.0)));
    CHECK_THROWS_AS(asympv_ratio(t, 2.0 * t.max(), 1.0), DomainError);

    CHECK_THROWS_AS(estimate_renewal(sample_ladder_heights(StableSpec::preset(2.0), 2.0, 10, 1), t.grid().subspan(0, 3)),
                    InsufficientSamples);
}

TEST_CASE("asympv ratio of a pure power is one")
{
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
    std::vector<double> shifted;
    for (double g : grid) shifted.push_back(1.0 + g);
    const RenewalTable linear(grid, grid, shifted, 0.0, 1000);
    CHECK(asympv_ratio(linear, 9.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("renewal table csv round trip")
{
    const auto& t = gaussian_table();
    std::stringstream ss;
    t.write_csv(ss);
    CHECK(RenewalTable::read_csv(ss) == t);
    std::stringstream bad("# renewal_table v1 plus_exponent=1 minus_exponent=1\ngrid,v_plus\n");
    CHECK_THROWS(RenewalTable::read_csv(bad));
}

TEST_CASE("strict renewal is (1 - zeta) times weak renewal")
{
    // Simple random walk: zeta = 1/2 and the strict ascending heights are 1, 2, 3, ...
    const auto law = IncrementLaw::two_point(-1.0, 1.0, 0.5);
    const auto s = sample_ladder_heights(law, 10.0, 4000, 5);
    CHECK(std::abs(s.zeta() - 0.5) < 0.02);
    std::vector<double> grid{0.0, 2.5, 5.0, 7.5, 10.0};
    const auto weak = estimate_renewal(s, grid, LadderKind::kWeak);
    const auto strict = estimate_renewal(s, grid, LadderKind::kStrict);
    for (double x : grid) {
        INFO("x=" << x);
        CHECK(strict.plus_at(x) == doctest::Approx(1.0 + std::floor(x)).epsilon(1e-12));
        CHECK(strict.plus_at(x) == doctest::Approx((1.0 - weak.zeta()) * weak.plus_at(x)).epsilon(0.05));
    }
}

TEST_CASE("ladder epoch tails")
{
    const std::vector<int> at{100, 200, 400, 800, 1600, 3200, 6400, 10000};
    std::vector<double> ex(at.begin(), at.end());
    const auto up = ladder_epoch_tail(StableSpec::preset(1.5, 0.4), Direction::kAscending, at, 40'000, 2);
    const double rho = StableSpec::preset(1.5, 0.4).rho();
    CHECK(std::abs(-tail_index_fit(ex, up).exponent - rho) <= 0.1);
    const auto down = ladder_epoch_tail(StableSpec::preset(1.5, 0.4), Direction::kDescending, at, 40'000, 3);
    CHECK(std::abs(-tail_index_fit(ex, down).exponent - (1.0 - rho)) <= 0.1);
}

TEST_CASE("walk conditioned to stay nonnegative")
{
    const auto& t = gaussian_table();
    const auto law = IncrementLaw(StableSpec::preset(2.0));
    Rng rng = Rng::for_trial(7, Stream::kMeander, 0);
    ConditionOptions rej;
    rej.method = ConditionMethod::kRejection;
    std::vector<double> a, b;
    for (int i = 0; i < 10'000; ++i) {
        const auto p = conditioned_sample_positive(law, 1000, 0.0, t, rng);
        CHECK(min_stats(p, 0).min >= 0.0);
        a.push_back(p.back() / norming(2.0, 1000));
        b.push_back(conditioned_sample_positive(law, 1000, 0.0, t, rng, rej).back() / norming(2.0, 1000));
    }
    CHECK(ks_distance(Ecdf(a), Ecdf(b)) <= 0.02);

    // One step from 0: the increment law tilted by V-(y) on y >= 0.
    std::vector<double> one;
    for (int i = 0; i < 100'000; ++i) one.push_back(conditioned_sample_positive(law, 1, 0.0, t, rng).back());
    auto tilted = [&](double y) {
        return integrate([&](double u) { return normal_pdf(u) * t.minus_at(u); }, 0.0, y, 1e-10, 1e-10).value;
    };
    const double total = tilted(12.0);
    CHECK(total == doctest::Approx(1.0).epsilon(0.03));
    const Ecdf e(one);
    for (double y : {0.3, 0.8, 1.5, 2.5}) CHECK(std::abs(e(y) - tilted(y) / total) < 0.01);
}

TEST_CASE("event B probability")
{
    const auto spec = StableSpec::preset(2.0);
    const auto& t = gaussian_table();
    CHECK(event_b_probability(spec, -0.5, 100, 1000, 1, t).estimate == 0.0);
    const auto one = event_b_probability(spec, 30.0, 1, 200'000, 2, t);
    CHECK(std::abs(one.estimate - 0.5) < 4.0 * one.std_error + 1e-12);
    const auto b = event_b_probability(spec, norming(spec, 200), 2000, 400'000, 3, t);
    CHECK(b.ratio() >= 0.85);
    CHECK(b.ratio() <= 1.15);
}

TEST_CASE("exponential functional")
{
    const auto spec = StableSpec::preset(2.0);
    const auto a = exp_functional_series(spec, 1000);
    CHECK(a[0] == 1.0);
    double lo = 1e300, hi = 0.0;
    for (int j = 10; j <= 1000; ++j) {
        const double scaled = a[j] * std::pow(j, 1.5);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 1.5);
    const auto mc = exp_functional_mc(spec, 10, 400'000, 4);
    CHECK(std::abs(mc.value - a[10]) < 4.0 * mc.std_error);
    double partial = 0.0;
    for (double v : a) partial += v;
    CHECK(exp_functional_total(spec) > partial);

    const auto heavy = StableSpec::preset(1.5, 0.4);
    const auto h = exp_functional_series(heavy, 10);
    const auto hmc = exp_functional_mc(heavy, 10, 400'000, 5);
    CHECK(std::abs(hmc.value - h[10]) < 4.0 * hmc.std_error);
}
