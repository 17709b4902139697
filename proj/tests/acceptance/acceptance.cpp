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

// Acceptance suite: one PASS/FAIL line per criterion. Run with criterion
// numbers as arguments to select a subset. Worker threads come from
// REDUCED_BPRE_THREADS (default: hardware concurrency).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "rbpre/bpre.hpp"
#include "rbpre/cli.hpp"
#include "rbpre/errors.hpp"
#include "rbpre/limits.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/parallel.hpp"
#include "rbpre/stats.hpp"

using namespace rbpre;

namespace {

unsigned g_threads = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Stable-law fidelity.
Outcome stable_fidelity()
{
    const std::pair<double, double> presets[] = {{2.0, 0.0}, {1.5, 0.0}, {1.5, 0.4}, {0.8, 0.0}};
    const std::size_t n = 1'000'000;
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    bool pass = true;
    double worst = 0.0;
    for (auto [a, b] : presets) {
        const auto spec = StableSpec::preset(a, b);
        constexpr std::size_t kBlock = 65536;
        const double ws[] = {0.5, 1.0, 2.0};
        using Sums = std::array<std::complex<double>, 3>;
        const auto parts = parallel_map<Sums>(block_count(n, kBlock), g_threads, [&](std::size_t blk) {
            const auto range = block_range(blk, kBlock, n);
            Sums s{};
            for (std::size_t i = range.begin; i < range.end; ++i) {
                Rng rng = Rng::for_trial(101, Stream::kIncrements, i);
                const double x = sample_increment(spec, rng);
                for (int k = 0; k < 3; ++k) s[k] += std::exp(std::complex<double>(0.0, ws[k] * x));
            }
            return s;
        });
        for (int k = 0; k < 3; ++k) {
            std::complex<double> acc = 0.0;
            for (const auto& p : parts) acc += p[k];
            const double err = std::abs(acc / static_cast<double>(n) - spec.characteristic(ws[k]));
            worst = std::max(worst, err);
            pass = pass && err <= tol;
        }
    }
    return {pass, "max |ecf - G| = " + fmt("%.2e", worst) + " (tol " + fmt("%.2e", tol) + ")"};
}

// ---------------------------------------------------------------------------
// 2. Ladder and renewal suite (alpha = 2).
Outcome ladder_renewal()
{
    const auto rep = walk_report(StableSpec::preset(2.0), 10'000, 100.0, 2000, 100'000, 202, g_threads);
    bool pass = true;
    std::string detail;
    for (const auto& r : rep.rows) {
        pass = pass && r.pass;
        detail += r.statistic + "=" + fmt("%.4g", r.value) + (r.pass ? "" : "(!)") + " ";
    }
    return {pass, detail};
}

// Shared renewal table for the conditioned-walk criteria (alpha = 2).
const RenewalTable& gaussian_table()
{
    static const RenewalTable t = renewal_for(StableSpec::preset(2.0), 40.0, 4000, 303, 401, {1'000'000, g_threads});
    return t;
}

// ---------------------------------------------------------------------------
// 3. P(S_n <= x, L_n >= 0) against its asymptotic formula.
Outcome event_b()
{
    const auto spec = StableSpec::preset(2.0);
    std::vector<Estimate> dev;
    std::string detail;
    double ratio_2000 = 0.0;
    for (int n : {500, 1000, 2000, 4000}) {
        const double x = norming(spec, std::ceil(std::pow(n, 0.65) - 1e-9));
        const auto b = event_b_probability(spec, x, n, 20'000'000, 404 + n, gaussian_table(), g_threads);
        const double r = b.ratio(), h = b.ratio_halfwidth();
        const double d = std::abs(r - 1.0);
        dev.push_back({d, std::max(0.0, d - h), d + h});
        detail += "n=" + std::to_string(n) + ":" + fmt("%.3f", r) + "+-" + fmt("%.3f", h) + " ";
        if (n == 2000) ratio_2000 = r;
    }
    const bool trend = trend_monotone(dev);
    const bool band = ratio_2000 >= 0.85 && ratio_2000 <= 1.15;
    return {trend && band, detail + "| ratio(2000) in [0.85,1.15]: " + (band ? "yes" : "no") +
                               ", trend: " + (trend ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 4. Simulator against exhaustive enumeration.
Outcome tiny_oracle()
{
    const EnvironmentModel m(Family::kLinearFractional, IncrementLaw::two_point(-1.0, 1.0, 0.5));
    const auto sc = ScenarioSpec::make(m, Regime::kThm1SmallTail, 4, 505, 1.0, 1.0, {}, 2);
    auto exact = brute_force_tiny({{-1.0, 1.0}, {0.5, 0.5}}, Family::kLinearFractional, 4, 2).conditioned(sc.threshold);
    const std::size_t n = 1'000'000;
    constexpr std::size_t kBlock = 16384;
    using Counts = std::map<std::pair<int, int>, double>;
    const auto parts = parallel_map<Counts>(block_count(n, kBlock), g_threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n);
        Counts c;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            const auto s = run_conditioned_trial(sc, static_cast<std::uint64_t>(i));
            if (s) c[{static_cast<int>(s->Z_r), static_cast<int>(s->Z_rn)}] += 1.0;
            else c[{-1, -1}] += 1.0;
        }
        return c;
    });
    Counts seen;
    for (const auto& p : parts)
        for (const auto& [k, v] : p) seen[k] += v / static_cast<double>(n);
    auto keys = exact;
    for (const auto& [k, v] : seen) keys[k] += 0.0;
    double tv = 0.0;
    for (const auto& [k, v] : keys) tv += 0.5 * std::abs(exact[k] - seen[k]);
    return {tv <= 0.02, "TV = " + fmt("%.4f", tv) + " (tol 0.02), P(accept) exact " +
                            fmt("%.4f", 1.0 - exact[{-1, -1}])};
}

// ---------------------------------------------------------------------------
// Conditioned runs shared by criteria 5 and 10.
const ConditionedRun& conditioned(Regime regime, int n, double theta = 1.0)
{
    static std::map<std::tuple<int, int, double>, ConditionedRun> cache;
    const auto key = std::make_tuple(static_cast<int>(regime), n, theta);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const EnvironmentModel m(Family::kLinearFractional, StableSpec::preset(2.0));
    auto sc = ScenarioSpec::make(m, regime, n, 606 + static_cast<std::uint64_t>(n), theta);
    sc.target_accepted = 5000;
    return cache.emplace(key, run_conditioned(sc, g_threads)).first->second;
}

struct KsLadder {
    std::vector<Estimate> ks;
    double last = 0.0;
    std::size_t min_accepted = 0;
    std::string detail;
};

KsLadder ks_ladder(Regime regime, const std::function<double(double)>& cdf,
                   const std::function<double(const std::vector<double>&)>& ks_of = {})
{
    KsLadder out;
    out.min_accepted = static_cast<std::size_t>(-1);
    for (int n : {1000, 2000, 4000}) {
        const auto& run = conditioned(regime, n);
        const auto sched = default_schedule(regime, n);
        std::vector<double> stat;
        for (const auto& s : run.samples) stat.push_back(regime_statistic(regime, s, sched, 2.0));
        const double ks = ks_of ? ks_of(stat) : ks_distance(Ecdf(stat), cdf);
        const double h = dkw_halfwidth(stat.size());
        out.ks.push_back({ks, std::max(0.0, ks - h), ks + h});
        out.last = ks;
        out.min_accepted = std::min(out.min_accepted, stat.size());
        out.detail += "n=" + std::to_string(n) + ":KS=" + fmt("%.3f", ks) + " ";
    }
    return out;
}

// 5. Small-tail regime: (log Z_rn - S_r)/a_m against 2 Phi(z ^ 0).
Outcome small_tail()
{
    const auto l = ks_ladder(Regime::kThm1SmallTail, [](double z) { return z < 0.0 ? 2.0 * normal_cdf(z) : 1.0; });
    const bool trend = trend_monotone(l.ks);
    const bool pass = l.last <= 0.15 && trend && l.min_accepted >= 5000;
    return {pass, l.detail + "| tol 0.15, trend: " + (trend ? "yes" : "no") + ", min accepted " +
                      std::to_string(l.min_accepted)};
}

// 6. min(r, n - r) >> k: log Z_rn / a_k against 1 - (1 - (t ^ y)/t)^2.
Outcome tail_regime()
{
    const auto l = ks_ladder(Regime::kThm3MinGgK, [](double y) { return tail_closed_form(1.0, y, 1.0); });
    const bool trend = trend_monotone(l.ks);
    const bool pass = l.last <= 0.15 && trend && l.min_accepted >= 5000;
    // log(n - r) / a_k at the top horizon; the limit needs this to vanish.
    const auto s = default_schedule(Regime::kThm3MinGgK, 4000);
    const double cond_log = std::log(static_cast<double>(s.m())) / norming(2.0, std::min(s.k, s.r));
    return {pass, l.detail + "| tol 0.15, trend: " + (trend ? "yes" : "no") + ", min accepted " +
                      std::to_string(l.min_accepted) + ", log(n-r)/a_k=" + fmt("%.2f", cond_log)};
}

// 7. Intermediate regime (theta = 1): log Z_rn / a_m against the A table.
Outcome intermediate()
{
    const auto spec = StableSpec::preset(2.0);
    const auto ens = min_and_endpoint_sampler(spec, 1000, 100'000, 707, g_threads);
    std::string detail;
    bool proper = true;
    for (double T : {0.5, 1.0, 2.0}) {
        const double v = a_limit(spec, T, T, ens).value;
        proper = proper && std::abs(v - 1.0) <= 0.02;
        detail += "A(" + fmt("%.1f", T) + "," + fmt("%.1f", T) + ")=" + fmt("%.4f", v) + " ";
    }
    std::vector<double> y;
    for (int i = 0; i <= 80; ++i) y.push_back(i / 80.0);
    const auto table = tabulate("A_scaled", "ensemble", 1.0, y,
                                [&](double v) { return a_limit_scaled(spec, 1.0, 1.0, v, ens); });
    std::vector<double> ax, vals;
    for (const auto& e : table.entries) {
        ax.push_back(e.arg2);
        vals.push_back(e.value);
    }
    const auto& run = conditioned(Regime::kThm2ThetaM, 4000);
    const auto sched = default_schedule(Regime::kThm2ThetaM, 4000);
    std::vector<double> stat;
    for (const auto& s : run.samples) stat.push_back(regime_statistic(Regime::kThm2ThetaM, s, sched, 2.0));
    const double ks = ks_distance(Ecdf(stat), ax, vals);
    const bool pass = proper && ks <= 0.2 && stat.size() >= 5000;
    return {pass, detail + "| KS(n=4000)=" + fmt("%.3f", ks) + " (tol 0.2), accepted " + std::to_string(stat.size())};
}

// ---------------------------------------------------------------------------
// 8. Properness of the limit laws.
Outcome properness()
{
    const auto spec = StableSpec::preset(2.0);
    std::vector<double> z;
    for (int i = 1; i <= 800; ++i) z.push_back(0.01 * i);
    MeanderOptions mo;
    mo.length = 10'000;
    mo.threads = g_threads;
    const auto table = meander_density(spec, z, 50'000, 808, mo);
    const auto mg = meander_grid(table);
    const auto top = cstar_and_h(spec, mg, 1e9);
    const bool norm = std::abs(top.cstar_h - 1.0) <= 1e-12;
    const double cstar_err = std::abs(top.cstar - std::sqrt(2.0 / std::numbers::pi));
    const auto w = w_limit(spec, 1.0, 1.0, mg);
    const bool w_ok = std::abs(w.value - 1.0) <= 0.05;

    // Minimum law from random-walk skeletons (not the exact bridge sampler).
    const std::size_t paths = 20'000;
    const int grid = 1000;
    std::vector<double> minima(paths);
    constexpr std::size_t kBlock = 256;
    const auto parts = parallel_map<std::vector<double>>(block_count(paths, kBlock), g_threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, paths);
        std::vector<double> out;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(809, Stream::kEnsemble, i);
            const auto p = sample_path(spec, grid, rng);
            out.push_back(*std::min_element(p.values.begin(), p.values.end()));
        }
        return out;
    });
    minima.clear();
    for (const auto& p : parts) minima.insert(minima.end(), p.begin(), p.end());
    const PathEnsemble skeleton(minima, std::vector<double>(minima.size(), 0.0), grid, false);
    double sup = 0.0;
    for (double v = -3.0; v <= 1e-12; v += 0.01)
        sup = std::max(sup, std::abs(skeleton.prob_min_le(std::min(v, 0.0)) - q_min(spec, std::min(v, 0.0)).value));
    const bool q_ok = sup <= 0.02;
    const bool pass = norm && cstar_err <= 0.01 && w_ok && q_ok;
    return {pass, "C**H(inf)-1=" + fmt("%.1e", top.cstar_h - 1.0) + " C**=" + fmt("%.4f", top.cstar) +
                      " (oracle 0.7979) W(1,1)=" + fmt("%.4f", w.value) + " sup|q_min-2Phi|=" + fmt("%.4f", sup)};
}

// ---------------------------------------------------------------------------
// 9. The constant in P(S_n <= x, Z_n > 0) ~ Theta P(S_n <= x, L_n >= 0).
Outcome theta_consistency()
{
    const EnvironmentModel m(Family::kLinearFractional, StableSpec::preset(2.0));
    ThetaOptions o;
    o.threads = g_threads;
    o.seed = 909;
    const auto est = estimate_theta(m, gaussian_table(), o);
    double lo = 1e300, hi = 0.0, mean = 0.0;
    std::string detail;
    bool bounded = true;
    for (const auto& r : est.ratios) {
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
        mean += r.ratio / static_cast<double>(est.ratios.size());
        bounded = bounded && r.ratio <= est.sparr_bound;
        detail += "n=" + std::to_string(r.n) + ":" + fmt("%.4f", r.ratio) + "+-" + fmt("%.4f", r.ratio_se) + " ";
    }
    const double spread = (hi - lo) / mean;
    const double vs_series = std::abs(mean - est.series) / est.series;
    const bool pass = spread <= 0.2 && bounded && est.series <= est.sparr_bound && vs_series <= 0.25;
    return {pass, detail + "| spread " + fmt("%.3f", spread) + " (tol 0.2), series " + fmt("%.4f", est.series) +
                      "+-" + fmt("%.4f", est.series_se) + " rel.diff " + fmt("%.3f", vs_series) +
                      " (tol 0.25), bound " + fmt("%.4f", est.sparr_bound)};
}

// ---------------------------------------------------------------------------
// 10. Diagnostics along the n-ladder in the small-tail preset.
Outcome diagnostics()
{
    std::vector<Estimate> delta, binom;
    std::string detail;
    for (int n : {1000, 2000, 4000}) {
        const auto& run = conditioned(Regime::kThm1SmallTail, n);
        const auto d = diagnostics_check(run.samples, default_schedule(Regime::kThm1SmallTail, n), 2.0);
        delta.push_back({d.delta_q95, d.delta_q95_low, d.delta_q95_high});
        binom.push_back({d.binom_q95, d.binom_q95_low, d.binom_q95_high});
        detail += "n=" + std::to_string(n) + ":|D|/a_m q95=" + fmt("%.3f", d.delta_q95) + " binom q95=" +
                  fmt("%.3f", d.binom_q95) + " ";
    }
    const bool a = trend_monotone(delta), b = trend_monotone(binom);
    return {a && b, detail + "| trends: " + (a ? "yes" : "no") + "/" + (b ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv)
{
    g_threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REDUCED_BPRE_THREADS")) g_threads = static_cast<unsigned>(std::max(1, std::atoi(env)));

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"stable-law fidelity", stable_fidelity},
        {"ladder/renewal suite", ladder_renewal},
        {"B(x,n) asymptotic", event_b},
        {"simulator vs exhaustive enumeration", tiny_oracle},
        {"small-tail regime limit law", small_tail},
        {"min(r,n-r) >> k closed-form law", tail_regime},
        {"intermediate regime vs A table", intermediate},
        {"limit-law properness", properness},
        {"Theta consistency", theta_consistency},
        {"diagnostics trends", diagnostics},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("CRITERION %2d %s  %s: %s [%.0f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
