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

#include "rbpre/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbpre/errors.hpp"

namespace rbpre {

namespace {

void check_range(const EnvRealization& env, int r, int n)
{
    if (r < 0 || r > n || n > env.n()) throw DomainError("need 0 <= r <= n <= horizon");
}

/// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double log_sum_exp(const std::vector<double>& v)
{
    const double m = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

} // namespace

std::string_view family_name(Family family)
{
    return family == Family::kPoisson ? "poisson" : "linear_fractional";
}

Family parse_family(std::string_view name)
{
    if (name == "poisson") return Family::kPoisson;
    if (name == "linear_fractional" || name == "geometric") return Family::kLinearFractional;
    throw ConfigError("unknown environment family '" + std::string(name) + "'");
}

double family_eta(Family family) { return family == Family::kPoisson ? 1.0 : 2.0; }

EnvironmentModel::EnvironmentModel(Family family, IncrementLaw increments, double b2_margin)
    : family_(family), increments_(std::move(increments)), eta_(family_eta(family)), b2_margin_(b2_margin)
{
    if (!(b2_margin > 0.0)) throw DomainError("B2 margin must be positive");
}

double EnvRealization::parameter(int i) const
{
    const double xi = x(i);
    return family == Family::kPoisson ? std::exp(xi) : 1.0 / (1.0 + std::exp(-xi));
}

EnvRealization draw_environment(const EnvironmentModel& model, int n, Rng& rng, double overflow_limit)
{
    if (n < 1) throw DomainError("environment horizon must be >= 1");
    EnvRealization env;
    env.family = model.family();
    env.increments.reserve(static_cast<std::size_t>(n));
    env.prefix.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) {
        const double x = model.increments().sample(rng);
        if (!(std::abs(x) <= overflow_limit)) throw EnvironmentOverflow("offspring mean e^X is not representable");
        env.increments.push_back(x);
        env.prefix.push_back(env.prefix.back() + x);
    }
    return env;
}

EnvRealization environment_from_increments(Family family, std::vector<double> increments)
{
    EnvRealization env;
    env.family = family;
    for (double x : increments) env.prefix.push_back(env.prefix.back() + x);
    env.increments = std::move(increments);
    return env;
}

double gf_eval(Family family, double parameter, double s) { return gf_derivatives(family, parameter, s).value; }

GfDerivatives gf_derivatives(Family family, double parameter, double s)
{
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("generating function argument must lie in [0,1]");
    if (family == Family::kPoisson) {
        if (!(parameter >= 0.0)) throw DomainError("Poisson mean must be >= 0");
        const double v = s == 1.0 ? 1.0 : std::exp(parameter * (s - 1.0));
        return {v, parameter * v, parameter * parameter * v};
    }
    if (!(parameter >= 0.0 && parameter < 1.0)) throw DomainError("linear-fractional p must lie in [0,1)");
    const double p = parameter, q = 1.0 - p;
    const double d = 1.0 - p * s;
    return {s == 1.0 ? 1.0 : q / d, p * q / (d * d), 2.0 * p * p * q / (d * d * d)};
}

double log_survival_step(Family family, double x, double u)
{
    const double z = x + u;
    if (family == Family::kLinearFractional) return -softplus(-z);
    // log(1 - exp(-e^z))
    if (z < -30.0) return z - 0.5 * std::exp(z);
    const double m = std::exp(z);
    if (m > 700.0) return 0.0;
    return std::log(-std::expm1(-m));
}

std::vector<double> log_survival_profile(const EnvRealization& env, int n)
{
    if (n < 0 || n > env.n()) throw DomainError("profile horizon outside the environment");
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = n - 1; j >= 0; --j) u[j] = log_survival_step(env.family, env.x(j + 1), u[j + 1]);
    return u;
}

Extinction extinction_backward(const EnvRealization& env, int r, int n)
{
    check_range(env, r, n);
    double u = 0.0;
    for (int j = n - 1; j >= r; --j) u = log_survival_step(env.family, env.x(j + 1), u);
    return {-std::expm1(u), u};
}

double survival_closed_form_lf(const EnvRealization& env, int r, int n)
{
    check_range(env, r, n);
    if (env.family != Family::kLinearFractional) throw DomainError("closed-form survival needs the linear-fractional family");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - r) + 1);
    for (int j = r; j <= n; ++j) terms.push_back(env.prefix[r] - env.prefix[j]);
    return std::exp(-log_sum_exp(terms));
}

double survival_lower_bound(const EnvRealization& env, int r, int n, double eta)
{
    check_range(env, r, n);
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - r) + 1);
    terms.push_back(env.prefix[r] - env.prefix[n]);
    const double log_eta = std::log(eta);
    for (int q = r; q < n; ++q) terms.push_back(log_eta + env.prefix[r] - env.prefix[q]);
    return std::exp(-log_sum_exp(terms));
}

} // namespace rbpre
