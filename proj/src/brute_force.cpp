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
#include <random>
#include <string>

#include "rbpre/bpre.hpp"
#include "rbpre/errors.hpp"

namespace rbpre {

namespace {

/// pmf of the sum of z offspring, k = 0..cap; returns the mass beyond cap.
double offspring_sum_pmf(Family family, double x, int z, int cap, std::vector<double>& pmf)
{
    pmf.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    if (z == 0) {
        pmf[0] = 1.0;
        return 0.0;
    }
    double kept = 0.0;
    if (family == Family::kPoisson) {
        const double mean = z * std::exp(x);
        for (int k = 0; k <= cap; ++k) {
            pmf[k] = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
            kept += pmf[k];
        }
    } else {
        // Negative binomial: C(k+z-1, k) q^z p^k.
        const double log_p = -std::log1p(std::exp(-x));
        const double log_q = -std::log1p(std::exp(x));
        for (int k = 0; k <= cap; ++k) {
            pmf[k] = std::exp(std::lgamma(k + z) - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(z)) +
                              z * log_q + k * log_p);
            kept += pmf[k];
        }
    }
    return std::max(0.0, 1.0 - kept);
}

double binomial_pmf(int n, int k, double log_p, double log_q)
{
    if (k < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_p +
                    (n - k) * log_q);
}

struct Attempt {
    TinyLaw law;
    double lost = 0.0;
};

Attempt enumerate(const DiscreteLaw& law, Family family, int n, int r, int z0, int cap)
{
    Attempt out;
    out.law.population_cap = cap;
    const std::size_t atoms = law.values.size();
    std::size_t sequences = 1;
    for (int i = 0; i < n; ++i) sequences *= atoms;
    std::vector<double> dist, next, pmf;
    for (std::size_t code = 0; code < sequences; ++code) {
        std::vector<double> xs;
        double weight = 1.0;
        std::size_t c = code;
        for (int i = 0; i < n; ++i) {
            xs.push_back(law.values[c % atoms]);
            weight *= law.probs[c % atoms];
            c /= atoms;
        }
        if (weight == 0.0) continue;
        const auto env = environment_from_increments(family, xs);
        dist.assign(static_cast<std::size_t>(cap) + 1, 0.0);
        dist[z0] = 1.0;
        for (int j = 1; j <= r; ++j) {
            next.assign(dist.size(), 0.0);
            for (int z = 0; z <= cap; ++z) {
                if (dist[z] == 0.0) continue;
                out.lost += weight * dist[z] * offspring_sum_pmf(family, env.x(j), z, cap, pmf);
                for (int k = 0; k <= cap; ++k) next[k] += dist[z] * pmf[k];
            }
            dist.swap(next);
        }
        const auto ext = extinction_backward(env, r, n);
        const double log_p = ext.log_survival;
        const double log_q = ext.q > 0.0 ? std::log(ext.q) : -INFINITY;
        for (int z = 0; z <= cap; ++z) {
            if (dist[z] == 0.0) continue;
            for (int k = 0; k <= z; ++k) {
                double pk = z == 0 ? 1.0 : binomial_pmf(z, k, log_p, log_q);
                if (k == z && ext.q == 0.0) pk = 1.0;
                else if (ext.q == 0.0) pk = 0.0;
                const double prob = weight * dist[z] * pk;
                out.law.total_mass += prob;
                if (prob > 0.0) out.law.outcomes.push_back({env.prefix[n], z, k, k >= 1, prob});
            }
        }
    }
    return out;
}

} // namespace

TinyLaw brute_force_tiny(const DiscreteLaw& law, Family family, int n, int r, int z0, double state_limit)
{
    if (law.values.empty() || law.values.size() != law.probs.size()) throw DomainError("malformed discrete law");
    if (n < 1 || n > 6) throw DomainError("brute force supports 1 <= n <= 6");
    if (r < 0 || r > n) throw DomainError("need 0 <= r <= n");
    if (z0 < 0) throw DomainError("z0 must be >= 0");
    const double sequences = std::pow(static_cast<double>(law.values.size()), n);
    for (int cap = std::max(64, 2 * z0); ; cap *= 2) {
        if (sequences * (cap + 1.0) * std::max(r, 1) > state_limit)
            throw StateSpaceTooLarge("enumeration needs more than " + std::to_string(state_limit) + " states");
        auto attempt = enumerate(law, family, n, r, z0, cap);
        if (attempt.lost < 1e-13) return std::move(attempt.law);
    }
}

std::map<std::pair<int, int>, double> TinyLaw::conditioned(double x) const
{
    std::map<std::pair<int, int>, double> out;
    double accepted = 0.0;
    for (const auto& o : outcomes) {
        if (o.survives && o.s_n <= x) {
            out[{o.z_r, o.z_rn}] += o.prob;
            accepted += o.prob;
        }
    }
    out[{-1, -1}] = 1.0 - accepted;
    return out;
}

double TinyLaw::survival_probability() const
{
    double p = 0.0;
    for (const auto& o : outcomes)
        if (o.survives) p += o.prob;
    return p;
}

TreeProfile simulate_tree(const EnvRealization& env, Rng& rng, int z0, int max_individuals)
{
    const int n = env.n();
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n) + 1);
    parents[0].assign(static_cast<std::size_t>(z0), -1);
    long long total = z0;
    for (int j = 1; j <= n; ++j) {
        const auto& prev = parents[j - 1];
        for (int i = 0; i < static_cast<int>(prev.size()); ++i) {
            long long kids;
            if (env.family == Family::kPoisson) {
                kids = static_cast<long long>(sample_poisson(env.parameter(j), rng));
            } else {
                std::geometric_distribution<long long> g(1.0 - env.parameter(j));
                kids = g(rng);
            }
            total += kids;
            if (total > max_individuals) throw PopulationOverflow("tree exceeded its individual budget");
            parents[j].insert(parents[j].end(), static_cast<std::size_t>(kids), i);
        }
    }
    TreeProfile out;
    for (const auto& gen : parents) out.z.push_back(static_cast<int>(gen.size()));
    out.reduced.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<char> alive(parents[n].size(), 1);
    out.reduced[n] = out.z[n];
    for (int j = n; j >= 1; --j) {
        std::vector<char> up(parents[j - 1].size(), 0);
        for (std::size_t i = 0; i < parents[j].size(); ++i)
            if (alive[i]) up[static_cast<std::size_t>(parents[j][i])] = 1;
        alive.swap(up);
        out.reduced[j - 1] = static_cast<int>(std::count(alive.begin(), alive.end(), 1));
    }
    return out;
}

} // namespace rbpre
