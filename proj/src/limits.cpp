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

#include "rbpre/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/parallel.hpp"
#include "rbpre/quadrature.hpp"

namespace rbpre {

namespace {

constexpr double kZ99 = 2.5758293035489;

struct PathAverage {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    void add(double v)
    {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    LawValue result() const
    {
        const auto cnt = static_cast<double>(n);
        const double mean = sum / cnt;
        const double var = std::max(0.0, sum_sq / cnt - mean * mean);
        return {mean, kZ99 * std::sqrt(var / std::max(1.0, cnt - 1.0))};
    }
};

/// Trapezoid rule on the grid plus the triangle [0, z_0], the integrands
/// all vanishing at z = 0.
double grid_integral(std::span<const double> z, std::span<const double> f)
{
    return 0.5 * z.front() * f.front() + trapezoid(z, f);
}

void check_meander(const MeanderGrid& m)
{
    if (m.z.empty() || m.z.size() != m.density.size()) throw DomainError("meander table is missing or malformed");
}

} // namespace

LawValue q_min(const StableSpec& spec, double z, const PathEnsemble* ensemble)
{
    if (z > 0.0) throw DomainError("q_min needs z <= 0");
    if (z == 0.0) return {1.0, 0.0};
    if (spec.gaussian()) return {2.0 * normal_cdf(z / spec.sigma()), 0.0};
    if (ensemble == nullptr) throw DomainError("q_min needs a path ensemble for alpha < 2");
    return {ensemble->prob_min_le(z), ensemble->halfwidth()};
}

LawValue a_limit(const StableSpec& spec, double T, double y, const PathEnsemble& ensemble)
{
    if (!(T > 0.0) || !(y >= 0.0 && y <= T)) throw DomainError("a_limit needs T > 0 and 0 <= y <= T");
    const double g = spec.alpha() * spec.rho() + 1.0;
    const double norm = std::pow(T, g);
    const auto minima = ensemble.minima();
    const auto ends = ensemble.endpoints();
    PathAverage avg;
    for (std::size_t i = 0; i < minima.size(); ++i) {
        const double lo = -minima[i];
        const double hi = std::min(y - minima[i], T - ends[i]);
        avg.add(hi > lo ? (std::pow(hi, g) - std::pow(lo, g)) / norm : 0.0);
    }
    return avg.result();
}

LawValue a_limit_scaled(const StableSpec& spec, double theta, double t, double y, const PathEnsemble& ensemble)
{
    if (!(theta > 0.0) || !(t > 0.0)) throw DomainError("a_limit_scaled needs theta > 0 and t > 0");
    if (y <= 0.0) return {0.0, 0.0};
    const double s = std::pow(theta, 1.0 / spec.alpha());
    return a_limit(spec, s * t, s * std::min(t, y), ensemble);
}

LawValue a2_limit(const StableSpec& spec, double t, double theta, double z, const PathEnsemble& ensemble)
{
    if (!(t > 0.0) || !(theta > 0.0)) throw DomainError("a2_limit needs t > 0 and theta > 0");
    if (z <= -t) return {0.0, 0.0};
    const double g = spec.alpha() * spec.rho() + 1.0;
    const double s = std::pow(theta, 1.0 / spec.alpha());
    const double norm = std::pow(t, g);
    const auto minima = ensemble.minima();
    const auto ends = ensemble.endpoints();
    PathAverage avg;
    for (std::size_t i = 0; i < minima.size(); ++i) {
        if (!std::isinf(z) && ends[i] < -z * s) {
            avg.add(0.0);
            continue;
        }
        const double lo = std::max(0.0, -minima[i] / s);
        const double hi = t - ends[i] / s;
        avg.add(hi > lo ? (std::pow(hi, g) - std::pow(lo, g)) / norm : 0.0);
    }
    return avg.result();
}

MeanderGrid meander_grid(const MeanderTable& table) { return {table.z, table.density}; }

MeanderGrid rayleigh_meander(std::span<const double> z)
{
    MeanderGrid m{{z.begin(), z.end()}, {}};
    for (double v : z) m.density.push_back(v * std::exp(-0.5 * v * v));
    return m;
}

CstarH cstar_and_h(const StableSpec& spec, const MeanderGrid& meander, double y)
{
    check_meander(meander);
    if (!(y >= 0.0)) throw DomainError("cstar_and_h needs y >= 0");
    const double a = spec.alpha() * (1.0 - spec.rho());
    std::vector<double> full(meander.z.size()), part(meander.z.size());
    for (std::size_t i = 0; i < meander.z.size(); ++i) {
        const double z = meander.z[i];
        full[i] = meander.density[i] * std::pow(z, a);
        part[i] = meander.density[i] * (std::pow(z, a) - std::pow(z - std::min(y, z), a));
    }
    const double total = grid_integral(meander.z, full);
    if (!(total > 0.0)) throw DomainError("meander table has no mass");
    return {1.0 / total, grid_integral(meander.z, part) / total};
}

LawValue w_limit(const StableSpec& spec, double t, double y, const MeanderGrid& meander)
{
    check_meander(meander);
    if (!(t > 0.0) || !(y >= 0.0 && y <= t)) throw DomainError("w_limit needs t > 0 and 0 <= y <= t");
    const double ar = spec.alpha() * spec.rho();
    const double b = spec.alpha() * (1.0 - spec.rho());
    const double cstar = cstar_and_h(spec, meander, 0.0).cstar;
    std::vector<double> f(meander.z.size(), 0.0);
    double quad_error = 0.0;
    for (std::size_t i = 0; i < meander.z.size(); ++i) {
        const double z = meander.z[i];
        const double lo = std::max(0.0, z - y);
        if (lo >= z || meander.density[i] == 0.0) continue;
        const auto first = integrate(
            [&](double q) { return std::pow(q, ar) * std::pow(std::max(0.0, t - z + q), b); }, lo, z, 1e-13, 1e-10,
            4000);
        const auto second = integrate(
            [&](double u) { return std::pow(std::max(0.0, t - z + std::pow(u, 1.0 / b)), ar + 1.0); },
            std::pow(lo, b), std::pow(z, b), 1e-13, 1e-10, 4000);
        f[i] = meander.density[i] * ((ar + 1.0) * first.value + second.value);
        quad_error += meander.density[i] * ((ar + 1.0) * first.error + second.error);
    }
    const double scale = cstar / std::pow(t, ar + 1.0);
    const double zmax = meander.z.back();
    return {scale * grid_integral(meander.z, f), scale * quad_error * zmax};
}

LawValue w_limit_scaled(const StableSpec& spec, double theta, double t, double y, const MeanderGrid& meander)
{
    if (!(theta > 0.0) || !(t > 0.0)) throw DomainError("w_limit_scaled needs theta > 0 and t > 0");
    if (y <= 0.0) return {0.0, 0.0};
    const double s = std::pow(theta, 1.0 / spec.alpha());
    return w_limit(spec, s * t, std::min(s * t, y), meander);
}

double tail_closed_form(double t, double y, double alpha_rho)
{
    if (!(t > 0.0)) throw DomainError("tail_closed_form needs t > 0");
    if (y <= 0.0) return 0.0;
    return 1.0 - std::pow(1.0 - std::min(t, y) / t, alpha_rho + 1.0);
}

LawValue meander_min_after(double s, double x, std::size_t n_paths, std::uint64_t seed, int grid_size,
                           unsigned threads)
{
    if (!(s >= 0.0 && s <= 1.0) || !(x >= 0.0)) throw DomainError("meander_min_after needs s in [0,1], x >= 0");
    if (n_paths < 1 || grid_size < 1) throw DomainError("meander_min_after needs paths and grid");
    if (s == 0.0) return {1.0, 0.0};
    const IncrementLaw law(StableSpec::preset(2.0));
    const double scale = std::sqrt(static_cast<double>(grid_size));
    const int first = static_cast<int>(std::ceil(s * grid_size));
    constexpr std::size_t kBlock = 256;
    const auto counts = parallel_map<std::size_t>(block_count(n_paths, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_paths);
        std::vector<double> path;
        std::size_t hits = 0;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kMeander, i);
            sample_nonnegative_walk(law, grid_size, rng, path, 100'000'000);
            const double low = *std::min_element(path.begin() + first, path.end());
            if (low <= x * scale) ++hits;
        }
        return hits;
    });
    std::size_t hits = 0;
    for (auto c : counts) hits += c;
    const double p = static_cast<double>(hits) / static_cast<double>(n_paths);
    return {p, kZ99 * std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(n_paths)) / static_cast<double>(n_paths))};
}

bool LimitLawTable::valid_subcdf(double slack) const
{
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.value < -e.error - slack || e.value > 1.0 + e.error + slack) return false;
        if (i > 0 && e.value < entries[i - 1].value - e.error - entries[i - 1].error - slack) return false;
    }
    return true;
}

double LimitLawTable::cdf(double x) const
{
    if (entries.empty()) throw DomainError("empty limit-law table");
    if (x <= entries.front().arg2) return entries.front().value;
    if (x >= entries.back().arg2) return entries.back().value;
    const auto it = std::lower_bound(entries.begin(), entries.end(), x,
                                     [](const LawEntry& e, double v) { return e.arg2 < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (x - lo.arg2) / (hi.arg2 - lo.arg2);
    return lo.value + w * (hi.value - lo.value);
}

void LimitLawTable::write_csv(std::ostream& out, bool header) const
{
    if (header) out << "law_id,arg1,arg2,value,error\n";
    char buf[200];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.3g\n", law_id.c_str(), e.arg1, e.arg2, e.value, e.error);
        out << buf;
    }
}

LimitLawTable tabulate(std::string law_id, std::string method, double arg1, std::span<const double> args,
                       const std::function<LawValue(double)>& law)
{
    LimitLawTable table{std::move(law_id), std::move(method), {}};
    for (double a : args) {
        const auto v = law(a);
        table.entries.push_back({arg1, a, v.value, v.error});
    }
    return table;
}

} // namespace rbpre
