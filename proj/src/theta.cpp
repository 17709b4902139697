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

#include <algorithm>
#include <cmath>

#include "rbpre/bpre.hpp"
#include "rbpre/errors.hpp"
#include "rbpre/parallel.hpp"

namespace rbpre {

std::vector<double> plus_extinction_samples(const EnvironmentModel& model, const RenewalTable& table,
                                            std::size_t n_envs, int horizon, std::uint64_t seed, unsigned threads)
{
    if (n_envs < 1 || horizon < 1) throw DomainError("need environments and a positive horizon");
    constexpr std::size_t kBlock = 64;
    const auto blocks = parallel_map<std::vector<double>>(block_count(n_envs, kBlock), threads, [&](std::size_t b) {
        const auto range = block_range(b, kBlock, n_envs);
        std::vector<double> qs;
        for (std::size_t i = range.begin; i < range.end; ++i) {
            Rng rng = Rng::for_trial(seed, Stream::kTheta, i);
            const auto path = conditioned_sample_positive(model.increments(), horizon, 0.0, table, rng);
            const auto env = environment_from_increments(model.family(), path.increments);
            qs.push_back(extinction_backward(env, 0, horizon).q);
        }
        return qs;
    });
    std::vector<double> out;
    for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
    return out;
}

namespace {

struct SeriesChunk {
    double sum = 0.0, sum_sq = 0.0, bound = 0.0;
    std::uint64_t above_k = 0;
};

} // namespace

ThetaSeries theta_series(const EnvironmentModel& model, const RenewalTable& table, const ThetaOptions& options)
{
    if (options.series_j < 0 || options.series_k < 1 || options.series_paths < 2)
        throw DomainError("series truncation needs J >= 0, K >= 1 and >= 2 paths");
    const auto qs = plus_extinction_samples(model, table, options.plus_envs, options.plus_horizon, options.seed,
                                            options.threads);
    std::vector<double> log_q;
    for (double q : qs) log_q.push_back(std::log(q));
    auto weight = [&](double i) {
        double acc = 0.0;
        for (double lq : log_q) acc += -std::expm1(i * lq);
        return acc / static_cast<double>(log_q.size());
    };
    std::vector<double> h(static_cast<std::size_t>(options.series_k) + 1, 0.0);
    for (int i = 1; i <= options.series_k; ++i) h[i] = weight(i);

    const auto& law = model.increments();
    const Family family = model.family();
    constexpr std::size_t kBlock = 1024;
    const auto chunks = parallel_map<SeriesChunk>(
        block_count(options.series_paths, kBlock), options.threads, [&](std::size_t b) {
            const auto range = block_range(b, kBlock, options.series_paths);
            SeriesChunk out;
            for (std::size_t p = range.begin; p < range.end; ++p) {
                Rng rng = Rng::for_trial(options.seed, Stream::kTheta, (1ULL << 40) + p);
                double z = 1.0, s = 0.0, low = 0.0;
                double total = h[1];
                double bound = 1.0;
                for (int j = 1; j <= options.series_j; ++j) {
                    const double x = law.sample(rng);
                    s += x;
                    z = family == Family::kPoisson ? sample_poisson(z * std::exp(x), rng)
                                                   : sample_negative_binomial(z, 1.0 / (1.0 + std::exp(-x)), rng);
                    if (z == 0.0) break;
                    if (s < low) {
                        low = s;
                        bound += 1.0;
                        if (z <= options.series_k) {
                            total += h[static_cast<std::size_t>(z)];
                        } else {
                            ++out.above_k;
                            total += weight(z);
                        }
                    }
                }
                out.sum += total;
                out.sum_sq += total * total;
                out.bound += bound;
            }
            return out;
        });
    SeriesChunk all;
    for (const auto& c : chunks) {
        all.sum += c.sum;
        all.sum_sq += c.sum_sq;
        all.bound += c.bound;
        all.above_k += c.above_k;
    }
    const auto n = static_cast<double>(options.series_paths);
    const double mean = all.sum / n;
    return {mean, std::sqrt(std::max(0.0, all.sum_sq / n - mean * mean) / (n - 1.0)), all.bound / n, all.above_k};
}

ThetaEstimate estimate_theta(const EnvironmentModel& model, const RenewalTable& table, const ThetaOptions& options)
{
    if (options.n_grid.empty()) throw DomainError("theta estimate needs a nonempty n grid");
    const auto& spec = model.increments().stable();
    ThetaEstimate out;
    for (int n : options.n_grid) {
        ThetaRatio row;
        row.n = n;
        row.k = static_cast<int>(std::ceil(std::pow(static_cast<double>(n), options.k_exponent) - 1e-9));
        row.x = options.t * norming(spec, row.k);
        const ConditionedEnvironmentSampler sampler(model, n, row.x);
        constexpr std::uint64_t kBlock = 2048;
        const auto counts = parallel_map<std::uint64_t>(
            block_count(options.r_trials, kBlock), options.threads, [&](std::size_t b) {
                const auto range = block_range(b, kBlock, options.r_trials);
                std::uint64_t hits = 0;
                for (std::size_t i = range.begin; i < range.end; ++i) {
                    Rng rng = Rng::for_trial(options.seed + static_cast<std::uint64_t>(n), Stream::kConditioned, i);
                    try {
                        if (sampler.draw(rng)) ++hits;
                    } catch (const EnvironmentOverflow&) {
                    }
                }
                return hits;
            });
        std::uint64_t hits = 0;
        for (auto c : counts) hits += c;
        if (hits == 0) throw InsufficientSamples("no conditioned environment accepted at n = " + std::to_string(n));
        const auto trials = static_cast<double>(options.r_trials);
        const double rate = static_cast<double>(hits) / trials;
        row.p_r = sampler.proposal_mass() * rate;
        row.p_r_se = sampler.proposal_mass() * std::sqrt(rate * (1.0 - rate) / trials);
        const auto b = event_b_probability(spec, row.x, n, options.b_trials, options.seed + 7919ULL * n, table,
                                           options.threads);
        row.p_b = b.estimate;
        row.p_b_se = b.std_error;
        if (!(row.p_b > 0.0)) throw InsufficientSamples("P(B) estimate is zero at n = " + std::to_string(n));
        row.ratio = row.p_r / row.p_b;
        row.ratio_se = row.ratio * std::hypot(row.p_r_se / row.p_r, row.p_b_se / row.p_b);
        out.ratios.push_back(row);
    }
    const auto series = theta_series(model, table, options);
    out.series = series.value;
    out.series_se = series.std_error;
    out.series_j = options.series_j;
    out.series_k = options.series_k;
    out.above_k = series.above_k;
    out.survival_bound = series.survival_bound;
    out.sparr_bound = exp_functional_total(spec);
    const auto coeffs = exp_functional_series(spec, options.series_j);
    double partial = 0.0;
    for (double c : coeffs) partial += c;
    out.truncation_mass = std::max(0.0, out.sparr_bound - partial);
    return out;
}

} // namespace rbpre
