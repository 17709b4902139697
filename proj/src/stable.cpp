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

#include "rbpre/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/parallel.hpp"
#include "rbpre/quadrature.hpp"

namespace rbpre {

namespace {

constexpr double kPi = std::numbers::pi;

bool admissible(double alpha, double beta)
{
    if (alpha == 2.0 || alpha == 1.0) return beta == 0.0;
    return alpha > 0.0 && alpha < 2.0 && std::abs(beta) < 1.0;
}


} // namespace

StableSpec::StableSpec(double alpha, double beta, double c) : alpha_(alpha), beta_(beta), c_(c)
{
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !admissible(alpha, beta)) {
        throw DomainError("stable parameters (alpha=" + std::to_string(alpha) + ", beta=" + std::to_string(beta) +
                          ") are not admissible");
    }
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("stable scale c must be positive");
    skew_ = (alpha == 1.0 || alpha == 2.0) ? 0.0 : beta * std::tan(kPi * alpha / 2.0);
    rho_ = 0.5 + std::atan(skew_) / (kPi * alpha);
    scale_ = std::pow(c, 1.0 / alpha);
}

StableSpec StableSpec::preset(double alpha, double beta) { return {alpha, beta, alpha == 2.0 ? 0.5 : 1.0}; }

double StableSpec::sigma() const
{
    if (!gaussian()) throw DomainError("sigma() is only defined for alpha = 2");
    return std::sqrt(2.0 * c_);
}

std::complex<double> StableSpec::characteristic(double w) const
{
    if (w == 0.0) return {1.0, 0.0};
    const double power = c_ * std::pow(std::abs(w), alpha_);
    const double sign = w > 0 ? 1.0 : -1.0;
    return std::exp(std::complex<double>(-power, power * skew_ * sign));
}

double sample_increment(const StableSpec& spec, Rng& rng)
{
    if (spec.gaussian()) return spec.sigma() * rng.normal();
    const double v = kPi * (rng.uniform() - 0.5);
    if (spec.alpha() == 1.0) return spec.c() * std::tan(v);
    const double alpha = spec.alpha();
    const double w = rng.exponential();
    const double b = std::atan(spec.skew()) / alpha;
    const double s = std::pow(1.0 + spec.skew() * spec.skew(), 1.0 / (2.0 * alpha));
    const double arg = alpha * (v + b);
    const double x = s * std::sin(arg) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - arg) / w, (1.0 - alpha) / alpha);
    return spec.scale() * x;
}

double stable_density(const StableSpec& spec, double x)
{
    const double alpha = spec.alpha();
    const double c = spec.c();
    const double k = spec.skew();
    const double w_max = std::pow((std::log(1e10) + 1.0) / c, 1.0 / alpha);
    auto integrand = [&](double w) {
        const double p = c * std::pow(w, alpha);
        return std::exp(-p) * std::cos(c * k * std::pow(w, alpha) - w * x);
    };
    // Panels no wider than half an oscillation of the x-dependent phase.
    const double width = std::abs(x) > 0 ? std::min(w_max, kPi / std::abs(x)) : w_max;
    const auto panels = static_cast<std::size_t>(std::ceil(w_max / width));
    std::vector<double> breaks(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) breaks[i] = w_max * static_cast<double>(i) / static_cast<double>(panels);
    // Concentrate effort near the origin where w^alpha is not smooth.
    if (alpha < 1.0 && panels >= 1) breaks.insert(breaks.begin() + 1, std::min(1e-3, breaks[1] / 2));
    const auto r = integrate_panels(integrand, breaks, 1e-12, 1e-10);
    return std::max(0.0, r.value / kPi);
}

double positivity_rho(const StableSpec& spec)
{
    const double k = spec.skew();
    if (k == 0.0) return 0.5;
    // With u = c w^alpha, (1/pi) int_0^inf Im G(w)/w dw = (1/(pi alpha)) int_0^inf e^{-u} sin(k u)/u du.
    auto integrand = [k](double u) { return u == 0.0 ? k : std::exp(-u) * std::sin(k * u) / u; };
    const double breaks[] = {0.0, 1.0, 5.0, 15.0, 45.0};
    const auto r = integrate_panels(integrand, breaks, 1e-13, 1e-12);
    return 0.5 + r.value / (kPi * spec.alpha());
}

double norming(double alpha, double n)
{
    if (!(n >= 1.0)) throw DomainError("norming requires n >= 1");
    return std::pow(n, 1.0 / alpha);
}

IncrementLaw::IncrementLaw(const StableSpec& spec) : stable_(true), spec_(spec) {}

IncrementLaw::IncrementLaw(double low, double high, double p_high)
    : stable_(false), spec_(StableSpec::preset(2.0)), low_(low), high_(high), p_high_(p_high)
{
}

IncrementLaw IncrementLaw::two_point(double low, double high, double p_high)
{
    if (!(low < high) || !(p_high > 0.0 && p_high < 1.0)) throw DomainError("two-point law needs low < high, p in (0,1)");
    return {low, high, p_high};
}

const StableSpec& IncrementLaw::stable() const
{
    if (!stable_) throw DomainError("increment law is not stable");
    return spec_;
}

StablePath sample_path(const StableSpec& spec, int grid_size, Rng& rng)
{
    if (grid_size < 1) throw DomainError("grid_size must be >= 1");
    StablePath path{grid_size, std::vector<double>(static_cast<std::size_t>(grid_size) + 1, 0.0)};
    const double step = std::pow(static_cast<double>(grid_size), -1.0 / spec.alpha());
    for (int j = 1; j <= grid_size; ++j) path.values[j] = path.values[j - 1] + step * sample_increment(spec, rng);
    return path;
}

PathEnsemble::PathEnsemble(std::vector<double> minima, std::vector<double> endpoints, int grid_size, bool exact)
    : minima_(std::move(minima)), endpoints_(std::move(endpoints)), sorted_minima_(minima_), grid_size_(grid_size),
      exact_(exact)
{
    if (minima_.size() != endpoints_.size() || minima_.empty()) throw DomainError("ensemble needs matching nonempty columns");
    std::sort(sorted_minima_.begin(), sorted_minima_.end());
}

double PathEnsemble::prob_min_le(double z) const
{
    const auto it = std::upper_bound(sorted_minima_.begin(), sorted_minima_.end(), z);
    return static_cast<double>(it - sorted_minima_.begin()) / static_cast<double>(size());
}

double PathEnsemble::joint(double min_lo, double min_hi, double end_hi) const
{
    std::size_t count = 0;
    for (std::size_t i = 0; i < minima_.size(); ++i) {
        if (minima_[i] >= min_lo && minima_[i] <= min_hi && endpoints_[i] <= end_hi) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(size());
}

double PathEnsemble::halfwidth(double delta) const
{
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(size())));
}

PathEnsemble min_and_endpoint_sampler(const StableSpec& spec, int grid_size, std::size_t n_paths, std::uint64_t seed,
                                      unsigned threads)
{
    if (n_paths < 1) throw DomainError("n_paths must be >= 1");
    if (grid_size < 1) throw DomainError("grid_size must be >= 1");
    constexpr std::size_t kBlock = 4096;
    struct Pair {
        std::vector<double> minima, endpoints;
    };
    const bool exact = spec.gaussian();
    const auto blocks = parallel_map<Pair>(block_count(n_paths, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_paths);
        Pair out;
        out.minima.reserve(range.end - range.begin);
        out.endpoints.reserve(range.end - range.begin);
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kEnsemble, i);
            if (exact) {
                // Endpoint, then the minimum of the Brownian bridge from 0 to it.
                const double sigma = spec.sigma();
                const double end = sigma * rng.normal();
                const double m = 0.5 * (end - std::sqrt(end * end - 2.0 * sigma * sigma * std::log(rng.uniform())));
                out.minima.push_back(m);
                out.endpoints.push_back(end);
            } else {
                const double step = std::pow(static_cast<double>(grid_size), -1.0 / spec.alpha());
                double y = 0.0, m = 0.0;
                for (int j = 0; j < grid_size; ++j) {
                    y += step * sample_increment(spec, rng);
                    m = std::min(m, y);
                }
                out.minima.push_back(m);
                out.endpoints.push_back(y);
            }
        }
        return out;
    });
    std::vector<double> minima, endpoints;
    minima.reserve(n_paths);
    endpoints.reserve(n_paths);
    for (const auto& b : blocks) {
        minima.insert(minima.end(), b.minima.begin(), b.minima.end());
        endpoints.insert(endpoints.end(), b.endpoints.begin(), b.endpoints.end());
    }
    return {std::move(minima), std::move(endpoints), exact ? 1 : grid_size, exact};
}

double MeanderTable::integral() const
{
    if (z.empty()) return 0.0;
    return 0.5 * z.front() * density.front() + trapezoid(z, density);
}

std::uint64_t sample_nonnegative_walk(const IncrementLaw& law, int length, Rng& rng, std::vector<double>& path,
                                      std::uint64_t max_attempts)
{
    path.assign(static_cast<std::size_t>(length) + 1, 0.0);
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        double s = 0.0;
        int j = 1;
        for (; j <= length; ++j) {
            s += law.sample(rng);
            if (s < 0.0) break;
            path[j] = s;
        }
        if (j > length) return attempt;
    }
    throw InsufficientSamples("conditioned walk: no path stayed nonnegative within " + std::to_string(max_attempts) +
                              " attempts");
}

MeanderTable meander_density(const StableSpec& spec, std::span<const double> z_grid, std::size_t n_paths,
                             std::uint64_t seed, const MeanderOptions& options)
{
    if (z_grid.empty() || z_grid.front() <= 0.0 || !std::is_sorted(z_grid.begin(), z_grid.end()))
        throw DomainError("meander z grid must be positive and increasing");
    if (n_paths < 2) throw DomainError("meander estimate needs at least two paths");
    if (options.length < 1) throw DomainError("meander walk length must be >= 1");
    const IncrementLaw law(spec);
    const double a_l = norming(spec, options.length);

    struct Chunk {
        std::vector<double> endpoints;
        std::uint64_t attempts = 0;
    };
    constexpr std::size_t kBlock = 256;
    const auto chunks = parallel_map<Chunk>(block_count(n_paths, kBlock), options.threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_paths);
        Chunk out;
        std::vector<double> path;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kMeander, i);
            out.attempts += sample_nonnegative_walk(law, options.length, rng, path, options.max_attempts_per_path);
            out.endpoints.push_back(path.back() / a_l);
        }
        return out;
    });

    MeanderTable table;
    table.length = options.length;
    for (const auto& c : chunks) {
        table.endpoints.insert(table.endpoints.end(), c.endpoints.begin(), c.endpoints.end());
        table.attempts += c.attempts;
    }
    const auto n = static_cast<double>(table.endpoints.size());
    double h = options.bandwidth;
    if (h <= 0.0) {
        std::vector<double> sorted = table.endpoints;
        std::sort(sorted.begin(), sorted.end());
        const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
        double var = 0.0;
        for (double v : sorted) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / (n - 1.0));
        const double iqr = sorted[static_cast<std::size_t>(0.75 * (n - 1))] - sorted[static_cast<std::size_t>(0.25 * (n - 1))];
        const double spread = iqr > 0 ? std::min(sd, iqr / 1.34) : sd;
        h = 0.9 * spread * std::pow(n, -0.2);
    }
    table.bandwidth = h;
    table.z.assign(z_grid.begin(), z_grid.end());
    table.density.assign(z_grid.size(), 0.0);
    for (std::size_t g = 0; g < z_grid.size(); ++g) {
        const double z = z_grid[g];
        double acc = 0.0;
        for (double x : table.endpoints) acc += normal_pdf((z - x) / h) - normal_pdf((z + x) / h);
        table.density[g] = std::max(0.0, acc / (n * h));
    }
    return table;
}

} // namespace rbpre
