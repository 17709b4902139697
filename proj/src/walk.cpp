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

#include "rbpre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/parallel.hpp"
#include "rbpre/quadrature.hpp"

namespace rbpre {

WalkPath WalkPath::from_increments(std::vector<double> increments, double start)
{
    WalkPath path;
    path.prefix.assign(1, start);
    path.prefix.reserve(increments.size() + 1);
    for (double x : increments) path.prefix.push_back(path.prefix.back() + x);
    path.increments = std::move(increments);
    return path;
}

WalkPath simulate_walk(const IncrementLaw& law, int n, Rng& rng)
{
    if (n < 0) throw DomainError("walk length must be >= 0");
    WalkPath path;
    path.increments.reserve(static_cast<std::size_t>(n));
    path.prefix.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) path.push(law.sample(rng));
    return path;
}

MinStats min_stats(const WalkPath& path, int r)
{
    const int n = path.steps();
    if (r < 0 || r > n) throw DomainError("min_stats requires 0 <= r <= n");
    MinStats out{path.prefix[r], r, n == 0 ? path.prefix[0] : path.prefix[1]};
    for (int i = r + 1; i <= n; ++i) {
        if (path.prefix[i] < out.min) {
            out.min = path.prefix[i];
            out.argmin = i;
        }
    }
    for (int i = 1; i <= n; ++i) out.max = std::max(out.max, path.prefix[i]);
    return out;
}

std::vector<int> LadderStats::strict_asc_epochs() const
{
    std::vector<int> out;
    double level = 0.0;
    for (std::size_t k = 0; k < weak_asc_epochs.size(); ++k) {
        if (asc_heights[k] > level) {
            out.push_back(weak_asc_epochs[k]);
            level = asc_heights[k];
        }
    }
    return out;
}

std::vector<int> LadderStats::strict_desc_epochs() const
{
    std::vector<int> out;
    double level = 0.0;
    for (std::size_t k = 0; k < weak_desc_epochs.size(); ++k) {
        if (desc_heights[k] > level) {
            out.push_back(weak_desc_epochs[k]);
            level = desc_heights[k];
        }
    }
    return out;
}

LadderStats ladder_decompose(const WalkPath& path)
{
    if (path.prefix.empty()) throw DomainError("ladder_decompose needs a nonempty path");
    LadderStats out;
    const double s0 = path.prefix.front();
    double low = s0, high = s0;
    std::size_t ties = 0;
    for (int i = 1; i <= path.steps(); ++i) {
        const double s = path.prefix[i];
        if (s <= low) {
            out.weak_desc_epochs.push_back(i);
            out.desc_heights.push_back(s0 - s);
            low = s;
        }
        if (s >= high) {
            if (s == high) ++ties;
            out.weak_asc_epochs.push_back(i);
            out.asc_heights.push_back(s - s0);
            high = s;
        }
    }
    if (!out.weak_asc_epochs.empty())
        out.zeta_estimate = static_cast<double>(ties) / static_cast<double>(out.weak_asc_epochs.size());
    return out;
}

namespace {

/// Runs one weak ladder excursion; returns the height gain (>= 0) or a
/// negative value when the cap was hit.
double ladder_excursion(const IncrementLaw& law, double sign, std::uint64_t cap, Rng& rng, std::uint64_t& steps)
{
    double s = 0.0;
    for (std::uint64_t i = 0; i < cap; ++i) {
        s += sign * law.sample(rng);
        ++steps;
        if (s >= 0.0) return s;
    }
    return -1.0;
}

struct LadderChunk {
    std::vector<std::vector<double>> asc, desc;
    std::uint64_t censored = 0, asc_steps = 0, asc_ties = 0;
};

} // namespace

LadderHeightSamples sample_ladder_heights(const IncrementLaw& law, double max_height, std::size_t n_sequences,
                                          std::uint64_t seed, const LadderOptions& options)
{
    if (!(max_height >= 0.0)) throw DomainError("max_height must be >= 0");
    constexpr std::size_t kBlock = 32;
    const auto chunks = parallel_map<LadderChunk>(block_count(n_sequences, kBlock), options.threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_sequences);
        LadderChunk out;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            for (int dir = 0; dir < 2; ++dir) {
                Rng rng = Rng::for_trial(seed, Stream::kLadder, 2 * i + static_cast<std::size_t>(dir));
                const double sign = dir == 0 ? 1.0 : -1.0;
                std::vector<double> heights;
                double h = 0.0;
                while (h <= max_height) {
                    std::uint64_t steps = 0;
                    double gain = ladder_excursion(law, sign, options.excursion_cap, rng, steps);
                    while (gain < 0.0) {
                        ++out.censored;
                        gain = ladder_excursion(law, sign, options.excursion_cap, rng, steps);
                    }
                    if (dir == 0) {
                        ++out.asc_steps;
                        if (gain == 0.0) ++out.asc_ties;
                    }
                    h += gain;
                    heights.push_back(h);
                }
                (dir == 0 ? out.asc : out.desc).push_back(std::move(heights));
            }
        }
        return out;
    });
    LadderHeightSamples samples;
    samples.max_height = max_height;
    for (auto& c : chunks) {
        for (auto& s : c.asc) samples.ascending.push_back(std::move(s));
        for (auto& s : c.desc) samples.descending.push_back(std::move(s));
        samples.censored += c.censored;
        samples.ascending_steps += c.asc_steps;
        samples.ascending_ties += c.asc_ties;
    }
    return samples;
}

RenewalTable::RenewalTable(std::vector<double> grid, std::vector<double> v_plus, std::vector<double> v_minus,
                           double zeta, std::size_t n_samples, double plus_exponent, double minus_exponent)
    : grid_(std::move(grid)), v_plus_(std::move(v_plus)), v_minus_(std::move(v_minus)), zeta_(zeta),
      n_samples_(n_samples), plus_exponent_(plus_exponent), minus_exponent_(minus_exponent)
{
    if (grid_.size() < 2 || grid_.front() != 0.0) throw DomainError("renewal grid must start at 0 with >= 2 points");
    if (!std::is_sorted(grid_.begin(), grid_.end()) || std::adjacent_find(grid_.begin(), grid_.end()) != grid_.end())
        throw DomainError("renewal grid must be strictly increasing");
    if (v_plus_.size() != grid_.size() || v_minus_.size() != grid_.size())
        throw DomainError("renewal columns must match the grid");
    if (!std::is_sorted(v_plus_.begin(), v_plus_.end()) || !std::is_sorted(v_minus_.begin(), v_minus_.end()))
        throw DomainError("renewal columns must be nondecreasing");
    if (v_plus_.front() < 0.0 || v_minus_.front() <= 0.0)
        throw DomainError("renewal columns must be nonnegative, and V- positive at 0");
}

double RenewalTable::lookup(std::span<const double> grid, std::span<const double> v, double exponent, double x)
{
    if (std::isnan(x)) throw DomainError("renewal lookup at NaN");
    if (x < 0.0) return 0.0;
    if (x <= grid.back()) return interpolate(grid, v, x);
    return v.back() * std::pow(x / grid.back(), exponent);
}

double RenewalTable::plus_at(double x) const { return lookup(grid_, v_plus_, plus_exponent_, x); }
double RenewalTable::minus_at(double x) const { return lookup(grid_, v_minus_, minus_exponent_, x); }

double RenewalTable::plus_integral(double x) const
{
    if (x <= 0.0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid_.size() && grid_[i] < x; ++i) {
        const double hi = std::min(x, grid_[i + 1]);
        total += 0.5 * (hi - grid_[i]) * (v_plus_[i] + plus_at(hi));
    }
    if (x > grid_.back()) {
        const double e = plus_exponent_ + 1.0;
        total += v_plus_.back() * grid_.back() / e * (std::pow(x / grid_.back(), e) - 1.0);
    }
    return total;
}

void RenewalTable::write_csv(std::ostream& out) const
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "# renewal_table v1 plus_exponent=%.17g minus_exponent=%.17g\n", plus_exponent_,
                  minus_exponent_);
    out << buf << "grid,v_plus,v_minus,zeta,n_samples\n";
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", grid_[i], v_plus_[i], v_minus_[i], zeta_,
                      n_samples_);
        out << buf;
    }
}

RenewalTable RenewalTable::read_csv(std::istream& in)
{
    std::string line;
    double plus_exp = 1.0, minus_exp = 1.0;
    std::vector<double> grid, vp, vm;
    double zeta = 0.0;
    std::size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# renewal_table v1 plus_exponent=%lf minus_exponent=%lf", &plus_exp,
                            &minus_exp) != 2)
                throw ConfigError("unrecognized renewal table header: " + line);
            continue;
        }
        if (!header) {
            if (line != "grid,v_plus,v_minus,zeta,n_samples") throw ConfigError("bad renewal table columns: " + line);
            header = true;
            continue;
        }
        double g, p, m;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%zu", &g, &p, &m, &zeta, &n) != 5)
            throw ConfigError("malformed renewal table row: " + line);
        grid.push_back(g);
        vp.push_back(p);
        vm.push_back(m);
    }
    return {std::move(grid), std::move(vp), std::move(vm), zeta, n, plus_exp, minus_exp};
}

namespace {

std::vector<double> renewal_column(const std::vector<std::vector<double>>& sequences, std::span<const double> grid,
                                   LadderKind kind)
{
    std::vector<double> counts(grid.size(), 0.0);
    std::vector<double> heights;
    for (const auto& seq : sequences) {
        heights.clear();
        double last = 0.0;
        for (double h : seq) {
            if (kind == LadderKind::kWeak || h > last) heights.push_back(h);
            last = h;
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            counts[g] += static_cast<double>(std::upper_bound(heights.begin(), heights.end(), grid[g]) - heights.begin());
        }
    }
    for (double& c : counts) c = 1.0 + c / static_cast<double>(sequences.size());
    return counts;
}

} // namespace

RenewalTable estimate_renewal(const LadderHeightSamples& samples, std::span<const double> grid, LadderKind kind,
                              double plus_exponent, double minus_exponent, std::size_t min_sequences)
{
    const std::size_t n = std::min(samples.ascending.size(), samples.descending.size());
    if (n < min_sequences || n == 0)
        throw InsufficientSamples("renewal estimate needs at least " + std::to_string(min_sequences) +
                                  " ladder-height sequences, got " + std::to_string(n));
    if (!grid.empty() && grid.back() > samples.max_height)
        throw DomainError("renewal grid exceeds the simulated ladder-height horizon");
    return {std::vector<double>(grid.begin(), grid.end()), renewal_column(samples.ascending, grid, kind),
            renewal_column(samples.descending, grid, kind), samples.zeta(), n, plus_exponent, minus_exponent};
}

RenewalTable renewal_for(const StableSpec& spec, double max_height, std::size_t n_sequences, std::uint64_t seed,
                         std::size_t grid_points, const LadderOptions& options)
{
    if (grid_points < 2) throw DomainError("renewal grid needs >= 2 points");
    const auto samples = sample_ladder_heights(spec, max_height, n_sequences, seed, options);
    std::vector<double> grid(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i)
        grid[i] = max_height * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    return estimate_renewal(samples, grid, LadderKind::kWeak, spec.alpha() * spec.rho(),
                            spec.alpha() * (1.0 - spec.rho()), std::min<std::size_t>(n_sequences, 1000));
}

double asympv_ratio(const RenewalTable& table, double x, double alpha_rho)
{
    if (!(x > 0.0) || x > table.max()) throw DomainError("asympv_ratio: x outside the renewal grid");
    return (alpha_rho + 1.0) * table.plus_integral(x) / (x * table.plus_at(x));
}

std::vector<double> ladder_epoch_tail(const IncrementLaw& law, Direction direction, std::span<const int> abscissae,
                                      std::size_t n_excursions, std::uint64_t seed, unsigned threads)
{
    if (abscissae.empty()) throw DomainError("ladder_epoch_tail needs abscissae");
    const int horizon = *std::max_element(abscissae.begin(), abscissae.end());
    const double sign = direction == Direction::kAscending ? 1.0 : -1.0;
    constexpr std::size_t kBlock = 1024;
    const auto blocks = parallel_map<std::vector<int>>(block_count(n_excursions, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_excursions);
        std::vector<int> epochs;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kLadder, i);
            double s = 0.0;
            int j = 1;
            for (; j <= horizon; ++j) {
                s += sign * law.sample(rng);
                if (s >= 0.0) break;
            }
            epochs.push_back(j);
        }
        return epochs;
    });
    std::vector<int> all;
    for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<double> tail;
    for (int n : abscissae) {
        const auto above = all.end() - std::upper_bound(all.begin(), all.end(), n);
        tail.push_back(static_cast<double>(above) / static_cast<double>(all.size()));
    }
    return tail;
}

double default_jump_bound(const IncrementLaw& law)
{
    if (!law.is_stable()) return std::max(law.high(), 0.0);
    const auto& spec = law.stable();
    if (spec.gaussian()) return 8.0 * spec.sigma();
    // Upper tail P(X > x) ~ const * c / x^alpha; pick x with tail mass ~1e-3.
    return spec.scale() * std::pow(1e3, 1.0 / spec.alpha());
}

WalkPath conditioned_sample_positive(const IncrementLaw& law, int n, double x0, const RenewalTable& table, Rng& rng,
                                     const ConditionOptions& options)
{
    if (n < 1) throw DomainError("conditioned path needs n >= 1");
    if (!(x0 >= 0.0)) throw DomainError("conditioned path needs x0 >= 0");
    if (x0 > table.max()) throw DomainError("starting point lies outside the renewal table");
    std::uint64_t attempts = 0;
    if (options.method == ConditionMethod::kRejection) {
        double spread = 0.0;
        if (law.is_stable()) {
            const auto& spec = law.stable();
            spread = norming(spec, n) * spec.scale() * (spec.gaussian() ? 6.0 : std::pow(100.0, 1.0 / spec.alpha()));
        } else {
            spread = n * std::max(std::abs(law.low()), std::abs(law.high()));
        }
        const double v_cap = table.minus_at(x0 + spread);
        WalkPath path;
        while (true) {
            path.increments.clear();
            path.prefix.assign(1, x0);
            bool alive = true;
            for (int j = 0; j < n && alive; ++j) {
                path.push(law.sample(rng));
                alive = path.prefix.back() >= 0.0;
            }
            if (++attempts > options.max_attempts)
                throw InsufficientSamples("rejection sampler for the conditioned walk exhausted its attempts");
            if (alive && rng.uniform() * v_cap <= table.minus_at(path.back())) return path;
        }
    }
    const double bound = options.jump_bound > 0.0 ? options.jump_bound : default_jump_bound(law);
    WalkPath path;
    path.prefix.assign(1, x0);
    path.increments.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double x = path.back();
        const double v_env = table.minus_at(x + bound);
        while (true) {
            if (++attempts > options.max_attempts)
                throw InsufficientSamples("h-transform sampler exhausted its attempts");
            const double u = law.sample(rng);
            const double y = x + u;
            if (y < 0.0) continue;
            if (u > bound || rng.uniform() * v_env <= table.minus_at(y)) {
                path.push(u);
                break;
            }
        }
    }
    return path;
}

double b_sequence(const StableSpec& spec, double n) { return 1.0 / (n * norming(spec, n)); }

namespace {

struct Moments {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
};

} // namespace

EventBResult event_b_probability(const StableSpec& spec, double x, int n, std::size_t n_trials, std::uint64_t seed,
                                 const RenewalTable& table, unsigned threads)
{
    if (n < 1 || n_trials < 1) throw DomainError("event_b_probability needs n >= 1 and n_trials >= 1");
    EventBResult out;
    out.trials = n_trials;
    if (x < 0.0) return out;
    out.prediction = stable_density(spec, 0.0) * table.minus_at(0.0) * b_sequence(spec, n) * table.plus_integral(x);
    const IncrementLaw law(spec);
    constexpr std::size_t kBlock = 4096;
    const auto blocks = parallel_map<Moments>(block_count(n_trials, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_trials);
        Moments m;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kEventB, i);
            double s = 0.0;
            double value = 0.0;
            const int free_steps = spec.gaussian() ? n - 1 : n;
            int j = 0;
            for (; j < free_steps; ++j) {
                s += law.sample(rng);
                if (s < 0.0) break;
            }
            if (j == free_steps) {
                if (spec.gaussian()) {
                    const double sigma = spec.sigma();
                    value = std::max(0.0, normal_cdf((x - s) / sigma) - normal_cdf(-s / sigma));
                } else {
                    value = s <= x ? 1.0 : 0.0;
                }
            }
            m.sum += value;
            m.sum_sq += value * value;
            ++m.count;
        }
        return m;
    });
    Moments total;
    for (const auto& m : blocks) {
        total.sum += m.sum;
        total.sum_sq += m.sum_sq;
        total.count += m.count;
    }
    const auto cnt = static_cast<double>(total.count);
    out.estimate = total.sum / cnt;
    const double var = std::max(0.0, total.sum_sq / cnt - out.estimate * out.estimate);
    out.std_error = std::sqrt(var / std::max(1.0, cnt - 1.0));
    out.ci_low = std::max(0.0, out.estimate - 2.5758 * out.std_error);
    out.ci_high = out.estimate + 2.5758 * out.std_error;
    return out;
}

namespace {

/// E[e^{a Y}; Y < 0] for Y ~ spec, a > 0.
double exp_moment_negative(const StableSpec& spec, double a)
{
    if (spec.gaussian()) {
        const double s = spec.sigma();
        return std::exp(0.5 * a * a * s * s + log_normal_cdf(-a * s));
    }
    const double alpha = spec.alpha(), c = spec.c(), k = spec.skew();
    auto integrand = [&](double w) {
        const double p = c * std::pow(w, alpha);
        const double decay = std::exp(-p);
        return (a * decay * std::cos(k * p) - w * decay * std::sin(k * p)) / (a * a + w * w);
    };
    const double w_max = std::pow(25.0 / c, 1.0 / alpha);
    std::vector<double> breaks{0.0};
    for (double b = 1e-4; b < w_max; b *= 4.0) breaks.push_back(b);
    if (a < w_max) breaks.push_back(a);
    breaks.push_back(w_max);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return integrate_panels(integrand, breaks, 1e-14, 1e-11).value / std::numbers::pi;
}

} // namespace

std::vector<double> exp_functional_series(const StableSpec& spec, int max_j)
{
    if (max_j < 0) throw DomainError("max_j must be >= 0");
    std::vector<double> e(static_cast<std::size_t>(max_j) + 1, 0.0);
    for (int m = 1; m <= max_j; ++m) e[m] = exp_moment_negative(spec, norming(spec, m));
    std::vector<double> a(static_cast<std::size_t>(max_j) + 1, 0.0);
    a[0] = 1.0;
    for (int j = 1; j <= max_j; ++j) {
        double acc = 0.0;
        for (int m = 1; m <= j; ++m) acc += e[m] * a[j - m];
        a[j] = acc / j;
    }
    return a;
}

double exp_functional_total(const StableSpec& spec)
{
    constexpr int kExact = 4000;
    double log_total = 0.0;
    for (int m = 1; m <= kExact; ++m) log_total += exp_moment_negative(spec, norming(spec, m)) / m;
    // Tail: E[e^{S_m}; S_m < 0] ~ g(0) / a_m, summed as an integral.
    const double g0 = stable_density(spec, 0.0);
    log_total += g0 * spec.alpha() * std::pow(kExact + 0.5, -1.0 / spec.alpha());
    return std::exp(log_total);
}

MonteCarloValue exp_functional_mc(const IncrementLaw& law, int j, std::size_t n_samples, std::uint64_t seed,
                                  unsigned threads)
{
    if (j < 0 || n_samples < 2) throw DomainError("exp_functional_mc needs j >= 0 and >= 2 samples");
    constexpr std::size_t kBlock = 4096;
    const auto blocks = parallel_map<Moments>(block_count(n_samples, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_samples);
        Moments m;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kExpFunctional, i);
            double s = 0.0;
            int step = 0;
            for (; step < j; ++step) {
                s += law.sample(rng);
                if (s >= 0.0) break;
            }
            const double v = step == j ? std::exp(s) : 0.0;
            m.sum += v;
            m.sum_sq += v * v;
            ++m.count;
        }
        return m;
    });
    Moments t;
    for (const auto& m : blocks) {
        t.sum += m.sum;
        t.sum_sq += m.sum_sq;
        t.count += m.count;
    }
    const auto cnt = static_cast<double>(t.count);
    const double mean = t.sum / cnt;
    return {mean, std::sqrt(std::max(0.0, t.sum_sq / cnt - mean * mean) / (cnt - 1.0))};
}

} // namespace rbpre
