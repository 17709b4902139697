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

#include "rbpre/bpre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "rbpre/errors.hpp"
#include "rbpre/normal.hpp"
#include "rbpre/parallel.hpp"

namespace rbpre {

namespace {

int ceil_pow(int n, double e) { return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), e) - 1e-9)); }

} // namespace

std::string_view regime_name(Regime regime)
{
    switch (regime) {
    case Regime::kThm1SmallTail: return "thm1_small_tail";
    case Regime::kThm2ThetaM: return "thm2_theta_m";
    case Regime::kThm3KggR: return "thm3_k_gg_r";
    case Regime::kThm3ThetaR: return "thm3_theta_r";
    case Regime::kThm3MinGgK: return "thm3_min_gg_k";
    case Regime::kWalkOnly: return "walk_only";
    }
    return "?";
}

Regime parse_regime(std::string_view name)
{
    if (name == "thm1" || name == "thm1_small_tail") return Regime::kThm1SmallTail;
    if (name == "thm2" || name == "thm2_theta_m") return Regime::kThm2ThetaM;
    if (name == "thm3_k_gg_r") return Regime::kThm3KggR;
    if (name == "thm3_theta_r") return Regime::kThm3ThetaR;
    if (name == "thm3_min_gg_k") return Regime::kThm3MinGgK;
    if (name == "walk_only") return Regime::kWalkOnly;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string_view regime_theorem(Regime regime)
{
    switch (regime) {
    case Regime::kThm1SmallTail: return "small_tail:min_law";
    case Regime::kThm2ThetaM: return "intermediate:A_law";
    case Regime::kThm3KggR: return "bounded_eta:C_H_law";
    case Regime::kThm3ThetaR: return "bounded_eta:W_law";
    case Regime::kThm3MinGgK: return "bounded_eta:tail_closed";
    case Regime::kWalkOnly: return "walk:ladder_renewal";
    }
    return "?";
}

Schedule default_schedule(Regime regime, int n, double theta)
{
    if (n < 2) throw ConfigError("horizon n must be >= 2");
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
    Schedule s{n, 0, 0};
    switch (regime) {
    case Regime::kThm1SmallTail:
        s.r = n - ceil_pow(n, 0.35);
        s.k = ceil_pow(n, 0.65);
        break;
    case Regime::kThm2ThetaM:
        s.r = n - ceil_pow(n, 0.5);
        s.k = static_cast<int>(std::ceil(theta * (n - s.r)));
        break;
    case Regime::kThm3KggR:
        s.r = ceil_pow(n, 0.3);
        s.k = ceil_pow(n, 0.6);
        break;
    case Regime::kThm3ThetaR:
        s.r = ceil_pow(n, 0.5);
        s.k = static_cast<int>(std::ceil(theta * s.r));
        break;
    case Regime::kThm3MinGgK:
        s.r = n / 2;
        s.k = ceil_pow(n, 0.4);
        break;
    case Regime::kWalkOnly:
        s.r = n / 2;
        s.k = ceil_pow(n, 0.65);
        break;
    }
    return s;
}

void validate_schedule(Regime regime, const Schedule& s)
{
    auto fail = [&](const std::string& why) {
        throw ConfigError(std::string(regime_name(regime)) + ": " + why + " (n=" + std::to_string(s.n) +
                          ", k=" + std::to_string(s.k) + ", r=" + std::to_string(s.r) + ", m=" + std::to_string(s.m()) +
                          ")");
    };
    if (s.r < 1 || s.r >= s.n) fail("need 1 <= r < n");
    if (s.k < 1 || s.k >= s.n) fail("need 1 <= k < n");
    switch (regime) {
    case Regime::kThm1SmallTail:
        if (s.k <= s.m()) fail("ordering n >> k >> m violated");
        break;
    case Regime::kThm3KggR:
        if (s.k <= s.r) fail("ordering n >> k >> r violated");
        break;
    case Regime::kThm3MinGgK:
        if (std::min(s.r, s.m()) <= s.k) fail("ordering min(r, n-r) >> k violated");
        break;
    default: break;
    }
}

bool cond_log_holds(double alpha, const Schedule& s)
{
    return std::log(static_cast<double>(s.m())) <= norming(alpha, std::min(s.k, s.r)) / 10.0;
}

ScenarioSpec ScenarioSpec::make(EnvironmentModel model, Regime regime, int n, std::uint64_t seed, double theta,
                                double t, std::optional<int> k, std::optional<int> r)
{
    if (!(t > 0.0)) throw ConfigError("t must be positive");
    Schedule s = default_schedule(regime, n, theta);
    if (k) s.k = *k;
    if (r) s.r = *r;
    validate_schedule(regime, s);
    ScenarioSpec spec{std::move(model), regime, s, theta, t, 0.0};
    spec.seed = seed;
    spec.threshold = t * norming(spec.alpha(), s.k);
    return spec;
}

double ScenarioSpec::alpha() const { return model.increments().is_stable() ? model.increments().stable().alpha() : 2.0; }

double regime_statistic(Regime regime, const ReducedSample& sample, const Schedule& s, double alpha)
{
    const double log_z = std::log(sample.Z_rn);
    switch (regime) {
    case Regime::kThm1SmallTail: return (log_z - sample.S_r) / norming(alpha, s.m());
    case Regime::kThm2ThetaM: return log_z / norming(alpha, s.m());
    case Regime::kThm3KggR: return log_z / norming(alpha, s.r);
    default: return log_z / norming(alpha, s.k);
    }
}

std::vector<double> simulate_generation_chain(const EnvRealization& env, int r, Rng& rng, double z0, double cap)
{
    if (r < 0 || r > env.n()) throw DomainError("chain length outside the environment");
    if (!(z0 >= 0.0)) throw DomainError("initial population must be >= 0");
    std::vector<double> z{z0};
    z.reserve(static_cast<std::size_t>(r) + 1);
    for (int j = 1; j <= r; ++j) {
        const double prev = z.back();
        double next = 0.0;
        if (prev > 0.0) {
            if (env.family == Family::kPoisson) {
                next = sample_poisson(prev * std::exp(env.x(j)), rng);
            } else {
                next = sample_negative_binomial(prev, env.parameter(j), rng);
            }
        }
        if (next > cap) throw PopulationOverflow("population exceeded the cap at generation " + std::to_string(j));
        z.push_back(next);
    }
    return z;
}

double reduced_count(double z_r, double q_rn, Rng& rng)
{
    if (!(q_rn >= 0.0 && q_rn <= 1.0)) throw DomainError("q must lie in [0,1]");
    return sample_binomial(z_r, 1.0 - q_rn, rng);
}

double reduced_count_log(double z_r, double log_survival, Rng& rng)
{
    return sample_binomial(z_r, std::exp(std::min(0.0, log_survival)), rng);
}

void fill_diagnostics(ReducedSample& sample, const EnvRealization& env, int r, int n, double eta)
{
    const auto& s = env.prefix;
    sample.S_r = s[r];
    sample.S_n = s[n];
    int tau = r;
    for (int i = r + 1; i <= n; ++i)
        if (s[i] < s[tau]) tau = i;
    sample.tau_rn = tau;
    sample.S_tau = s[tau];
    double acc = 0.0;
    for (int q = r; q < n; ++q) acc += std::exp(s[tau] - s[q]);
    sample.O_rn = 1.0 + eta * acc;
    sample.Delta_rn = sample.Z_r > 0.0 ? std::log(sample.Z_r) + sample.log_survival - sample.S_tau : 0.0;
}

std::optional<ReducedSample> run_conditioned_trial(const ScenarioSpec& sc, Rng& rng)
{
    const int n = sc.schedule.n, r = sc.schedule.r;
    const auto env = draw_environment(sc.model, n, rng);
    if (env.prefix[n] > sc.threshold) return std::nullopt;
    const auto z = simulate_generation_chain(env, r, rng);
    ReducedSample out;
    out.Z_r = z.back();
    if (out.Z_r == 0.0) return std::nullopt;
    const auto ext = extinction_backward(env, r, n);
    out.q_rn = ext.q;
    out.log_survival = ext.log_survival;
    out.Z_rn = reduced_count_log(out.Z_r, ext.log_survival, rng);
    if (out.Z_rn < 1.0) return std::nullopt;
    fill_diagnostics(out, env, r, n, sc.model.eta());
    return out;
}

std::optional<ReducedSample> run_conditioned_trial(const ScenarioSpec& scenario, std::uint64_t trial_index)
{
    Rng rng = Rng::for_trial(scenario.seed, Stream::kTrials, trial_index);
    auto out = run_conditioned_trial(scenario, rng);
    if (out) out->trial_index = trial_index;
    return out;
}

ConditionedEnvironmentSampler::ConditionedEnvironmentSampler(const EnvironmentModel& model, int n, double threshold,
                                                             bool allow_bridge)
    : model_(model), n_(n), threshold_(threshold), bridged_(allow_bridge && model.increments().gaussian())
{
    if (n < 1) throw DomainError("conditioned sampler needs n >= 1");
    if (!bridged_) return;
    const double sigma = model.increments().stable().sigma();
    variance_ = sigma * sigma * n;
    const double sd = std::sqrt(variance_);
    const double cut = std::min(0.0, threshold);
    mass_pos_ = threshold > 0.0 ? normal_cdf(threshold / sd) - 0.5 : 0.0;
    // int_{-inf}^{cut} phi_n(y) e^y dy = e^{v/2} Phi((cut - v)/sd)
    mass_neg_ = std::exp(0.5 * variance_ + log_normal_cdf((cut - variance_) / sd));
}

std::optional<ConditionedEnvironmentSampler::Draw> ConditionedEnvironmentSampler::draw(Rng& rng) const
{
    std::vector<double> inc;
    inc.reserve(static_cast<std::size_t>(n_));
    const double log_u = std::log(rng.uniform());
    double bound = 0.0;  // log of the survival envelope
    double level = 0.0;
    if (bridged_) {
        double y = 0.0;
        if (rng.uniform() * proposal_mass() < mass_pos_) {
            do {
                y = threshold_ * rng.uniform();
            } while (rng.uniform() >= std::exp(-0.5 * y * y / variance_));
        } else {
            const double cut = std::min(0.0, threshold_);
            do {
                y = cut - rng.exponential();
            } while (rng.uniform() >= std::exp(-0.5 * (y * y - cut * cut) / variance_));
        }
        bound = std::min(0.0, y);
        const double floor = log_u + bound;
        const double sigma2 = variance_ / n_;
        double s = 0.0;
        for (int j = 0; j < n_; ++j) {
            const int remaining = n_ - j;
            double x;
            if (remaining == 1) {
                x = y - s;
            } else {
                const double mean = (y - s) / remaining;
                x = mean + std::sqrt(sigma2 * (remaining - 1) / remaining) * rng.normal();
            }
            s += x;
            inc.push_back(x);
            if (s <= floor) return std::nullopt;
        }
        level = floor;
    } else {
        const auto& law = model_.increments();
        double s = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double x = law.sample(rng);
            s += x;
            inc.push_back(x);
            if (s <= log_u) return std::nullopt;
        }
        if (s > threshold_) return std::nullopt;
        level = log_u;
    }
    for (double x : inc)
        if (!(std::abs(x) <= 700.0)) throw EnvironmentOverflow("offspring mean e^X is not representable");
    Draw d{environment_from_increments(model_.family(), std::move(inc)), {}};
    d.log_survival = log_survival_profile(d.env, n_);
    if (level >= d.log_survival[0]) return std::nullopt;
    return d;
}

ReducedSample sample_population_given_survival(const EnvRealization& env, std::span<const double> u, int r, Rng& rng,
                                               double eta)
{
    const int n = env.n();
    if (r < 0 || r > n || static_cast<int>(u.size()) != n + 1) throw DomainError("survival profile does not match");
    double y = 1.0, d = 0.0;
    for (int j = 1; j <= r; ++j) {
        const double x = env.x(j);
        const double q_j = -std::expm1(u[j]);
        if (env.family == Family::kLinearFractional) {
            const double p = 1.0 / (1.0 + std::exp(-x));
            const double p_surv = 1.0 / (1.0 + std::exp(-(x + u[j])));
            const double y_next = y + sample_negative_binomial(y, p_surv, rng);
            d = sample_negative_binomial(y_next + y + d, p * q_j, rng);
            y = y_next;
        } else {
            const double lambda = std::exp(x);
            const double y_next = sample_zt_poisson_sum(y, std::exp(x + u[j]), rng);
            d = sample_poisson(lambda * q_j * (y + d), rng);
            y = y_next;
        }
    }
    ReducedSample out;
    out.Z_r = y + d;
    out.Z_rn = y;
    out.log_survival = u[r];
    out.q_rn = -std::expm1(u[r]);
    fill_diagnostics(out, env, r, n, eta);
    return out;
}

namespace {

struct Block {
    std::vector<ReducedSample> accepted;
    std::uint64_t discarded = 0;
};

} // namespace

ConditionedRun run_conditioned(const ScenarioSpec& sc, unsigned threads, SamplerKind kind)
{
    constexpr std::uint64_t kBlock = 512;
    constexpr std::size_t kWave = 32;
    const int r = sc.schedule.r;
    const ConditionedEnvironmentSampler sampler(sc.model, sc.schedule.n, sc.threshold);
    const double mass = kind == SamplerKind::kFast ? sampler.proposal_mass() : 1.0;

    ConditionedRun run;
    std::uint64_t next_block = 0;
    while (run.accepted_total < sc.target_accepted) {
        if (next_block * kBlock >= sc.max_trials) {
            run.exhausted = true;
            break;
        }
        const std::size_t blocks =
            std::min<std::uint64_t>(kWave, (sc.max_trials - next_block * kBlock + kBlock - 1) / kBlock);
        const auto wave = parallel_map<Block>(blocks, threads, [&](std::size_t b) {
            Block out;
            const std::uint64_t begin = (next_block + b) * kBlock;
            const std::uint64_t end = std::min(begin + kBlock, sc.max_trials);
            for (std::uint64_t i = begin; i < end; ++i) {
                try {
                    if (kind == SamplerKind::kPlain) {
                        if (auto s = run_conditioned_trial(sc, i)) out.accepted.push_back(*s);
                    } else {
                        Rng rng = Rng::for_trial(sc.seed, Stream::kConditioned, i);
                        if (auto d = sampler.draw(rng)) {
                            auto s = sample_population_given_survival(d->env, d->log_survival, r, rng, sc.model.eta());
                            s.trial_index = i;
                            out.accepted.push_back(s);
                        }
                    }
                } catch (const EnvironmentOverflow&) {
                    ++out.discarded;
                } catch (const PopulationOverflow&) {
                    ++out.discarded;
                }
            }
            return out;
        });
        for (const auto& b : wave) {
            run.accepted_total += b.accepted.size();
            run.discarded += b.discarded;
            if (run.samples.size() < sc.target_accepted) {
                const std::size_t room = sc.target_accepted - run.samples.size();
                const std::size_t take = std::min(room, b.accepted.size());
                run.samples.insert(run.samples.end(), b.accepted.begin(), b.accepted.begin() + static_cast<std::ptrdiff_t>(take));
            }
        }
        next_block += blocks;
        run.trials = std::min<std::uint64_t>(next_block * kBlock, sc.max_trials);
    }
    const auto n = static_cast<double>(run.trials);
    if (n > 0) {
        const double rate = static_cast<double>(run.accepted_total) / n;
        run.p_event = mass * rate;
        run.p_event_se = mass * std::sqrt(rate * (1.0 - rate) / n);
    }
    return run;
}

void write_samples_csv(std::ostream& out, std::span<const ReducedSample> samples)
{
    out << "# reduced_bpre samples v1\n";
    out << "trial_index,S_r,S_n,S_tau,tau_rn,Z_r,q_rn,Z_rn,O_rn,Delta_rn\n";
    char buf[400];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%llu,%.10g,%.10g,%.10g,%d,%.17g,%.17g,%.17g,%.10g,%.10g\n",
                      static_cast<unsigned long long>(s.trial_index), s.S_r, s.S_n, s.S_tau, s.tau_rn, s.Z_r, s.q_rn,
                      s.Z_rn, s.O_rn, s.Delta_rn);
        out << buf;
    }
}

} // namespace rbpre
