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

#include "rbpre/population.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rbpre/errors.hpp"

namespace rbpre {

namespace {

double rounded_normal(double mean, double var, Rng& rng)
{
    return std::max(0.0, std::round(mean + std::sqrt(var) * rng.normal()));
}

} // namespace

double sample_poisson(double mean, Rng& rng)
{
    if (!(mean >= 0.0)) throw DomainError("Poisson mean must be >= 0");
    if (mean == 0.0) return 0.0;
    if (mean > kExactCountLimit) return rounded_normal(mean, mean, rng);
    std::poisson_distribution<long long> d(mean);
    return static_cast<double>(d(rng));
}

double sample_negative_binomial(double count, double pi, Rng& rng)
{
    if (!(count >= 0.0) || !(pi >= 0.0 && pi < 1.0)) throw DomainError("negative binomial needs count >= 0, pi in [0,1)");
    if (count == 0.0 || pi == 0.0) return 0.0;
    const double mean = count * pi / (1.0 - pi);
    if (count > kExactCountLimit || mean > kExactCountLimit) return rounded_normal(mean, mean / (1.0 - pi), rng);
    if (count <= 16.0) {
        std::geometric_distribution<long long> g(1.0 - pi);
        double total = 0.0;
        for (int i = 0; i < static_cast<int>(count); ++i) total += static_cast<double>(g(rng));
        return total;
    }
    std::gamma_distribution<double> gamma(count, pi / (1.0 - pi));
    return sample_poisson(gamma(rng), rng);
}

double sample_binomial(double count, double p, Rng& rng)
{
    if (!(count >= 0.0) || !(p >= 0.0 && p <= 1.0)) throw DomainError("binomial needs count >= 0, p in [0,1]");
    if (count == 0.0 || p == 0.0) return 0.0;
    if (p == 1.0) return count;
    if (count <= kExactCountLimit) {
        std::binomial_distribution<long long> d(static_cast<long long>(count), p);
        return static_cast<double>(d(rng));
    }
    const double mean = count * p;
    if (mean < 1e3) return sample_poisson(mean, rng);
    if (count * (1.0 - p) < 1e3) return count - sample_poisson(count * (1.0 - p), rng);
    return std::min(count, rounded_normal(mean, mean * (1.0 - p), rng));
}

double sample_zt_poisson(double mu, Rng& rng)
{
    if (!(mu > 0.0)) throw DomainError("zero-truncated Poisson needs mu > 0");
    if (mu >= 1.0) {
        while (true) {
            const double k = sample_poisson(mu, rng);
            if (k >= 1.0) return k;
        }
    }
    // Inversion from k = 1 with p_k = mu^k / (k! (e^mu - 1)).
    double u = rng.uniform();
    double pk = mu / std::expm1(mu);
    double k = 1.0;
    while (u > pk && pk > 0.0) {
        u -= pk;
        k += 1.0;
        pk *= mu / k;
    }
    return k;
}

double sample_zt_poisson_sum(double count, double mu, Rng& rng)
{
    if (!(count >= 0.0)) throw DomainError("count must be >= 0");
    if (count == 0.0) return 0.0;
    if (count <= 1000.0) {
        double total = 0.0;
        for (int i = 0; i < static_cast<int>(count); ++i) total += sample_zt_poisson(mu, rng);
        return total;
    }
    // Moment-matched normal for many parents; each contributes at least one.
    const double m = mu / -std::expm1(-mu);
    const double var = m * (1.0 + mu - m);
    return std::max(count, rounded_normal(count * m, count * var, rng));
}

} // namespace rbpre
