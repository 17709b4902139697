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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rbpre/envs.hpp"
#include "rbpre/population.hpp"
#include "rbpre/rng.hpp"
#include "rbpre/stable.hpp"
#include "rbpre/walk.hpp"

namespace rbpre {

/// How (k, r) grow with n.
enum class Regime { kThm1SmallTail, kThm2ThetaM, kThm3KggR, kThm3ThetaR, kThm3MinGgK, kWalkOnly };

std::string_view regime_name(Regime regime);
/// Accepts the full names and the short aliases thm1, thm2.
Regime parse_regime(std::string_view name);
/// The limit statement a regime exercises, for report rows.
std::string_view regime_theorem(Regime regime);

struct Schedule {
    int n = 0;
    int k = 0;
    int r = 0;
    int m() const noexcept { return n - r; }
};

/// Default growth laws:
///   thm1: m = ceil(n^0.35), k = ceil(n^0.65)     thm2: m = ceil(n^0.5), k = ceil(theta m)
///   thm3_k_gg_r: r = ceil(n^0.3), k = ceil(n^0.6) thm3_theta_r: r = ceil(n^0.5), k = ceil(theta r)
///   thm3_min_gg_k: r = floor(n/2), k = ceil(n^0.4) walk_only: k = ceil(n^0.65), r = floor(n/2)
Schedule default_schedule(Regime regime, int n, double theta = 1.0);

/// Throws ConfigError unless 1 <= r < n, 1 <= k < n and the regime's ordering
/// holds (thm1: k > m; thm3_k_gg_r: k > r; thm3_min_gg_k: min(r, n-r) > k).
void validate_schedule(Regime regime, const Schedule& schedule);

/// log(n - r) <= a_{min(k,r)} / 10, the growth condition of the third regime
/// family. Recorded, not enforced.
bool cond_log_holds(double alpha, const Schedule& schedule);

struct ScenarioSpec {
    EnvironmentModel model;
    Regime regime = Regime::kThm1SmallTail;
    Schedule schedule;
    double theta = 1.0;
    double t = 1.0;
    /// Walk threshold t a_k (or an explicit value for non-stable laws).
    double threshold = 0.0;
    std::size_t target_accepted = 5000;
    std::uint64_t max_trials = 1'000'000'000;
    std::uint64_t seed = 0;

    /// Builds and validates; k and r override the regime defaults.
    static ScenarioSpec make(EnvironmentModel model, Regime regime, int n, std::uint64_t seed, double theta = 1.0,
                             double t = 1.0, std::optional<int> k = {}, std::optional<int> r = {});
    double alpha() const;
};

/// One accepted conditioned trial.
struct ReducedSample {
    std::uint64_t trial_index = 0;
    double S_r = 0.0;
    double S_n = 0.0;
    double S_tau = 0.0;
    int tau_rn = 0;
    double Z_r = 0.0;
    double q_rn = 0.0;
    /// log(1 - q_rn), kept so tiny survival probabilities stay exact.
    double log_survival = 0.0;
    double Z_rn = 0.0;
    double O_rn = 0.0;
    double Delta_rn = 0.0;
};

/// The regime's normalized statistic: (log Z_rn - S_r)/a_m for thm1,
/// log Z_rn / a_m for thm2, / a_r for thm3_k_gg_r, / a_k otherwise.
double regime_statistic(Regime regime, const ReducedSample& sample, const Schedule& schedule, double alpha);

/// Z_0..Z_r under the given environment (exact conditional Markov chain,
/// absorbing at 0). Throws PopulationOverflow when a count exceeds `cap`.
std::vector<double> simulate_generation_chain(const EnvRealization& env, int r, Rng& rng, double z0 = 1.0,
                                              double cap = kExactCountLimit);

/// Z_rn ~ Binomial(Z_r, 1 - q_rn).
double reduced_count(double z_r, double q_rn, Rng& rng);
/// Same law, parameterized by log(1 - q_rn).
double reduced_count_log(double z_r, double log_survival, Rng& rng);

/// Fills S_r, S_n, S_tau, tau_rn, O_rn and Delta_rn from the environment and
/// the already-set Z_r, log_survival.
void fill_diagnostics(ReducedSample& sample, const EnvRealization& env, int r, int n, double eta);

/// The staged rejection pipeline: walk predicate, chain to r, F_{r,n}(0),
/// binomial survivors. Returns nothing when rejected. Throws
/// EnvironmentOverflow / PopulationOverflow for discarded trials.
std::optional<ReducedSample> run_conditioned_trial(const ScenarioSpec& scenario, Rng& rng);
std::optional<ReducedSample> run_conditioned_trial(const ScenarioSpec& scenario, std::uint64_t trial_index);

/// Exact sampler of environments from the law of the environment given
/// {S_n <= x, Z_n > 0}. With gaussian increments S_n is drawn from
/// phi_n(y) 1{y <= x} min(1, e^y) and the path completed as a Gaussian bridge;
/// otherwise the walk runs forward. Either way the draw is accepted with
/// probability P(Z_n > 0 | env) / bound, where bound >= P(Z_n > 0 | env)
/// (e^{min S} caps the survival), and the path is dropped as soon as the
/// running minimum proves rejection.
class ConditionedEnvironmentSampler {
public:
    ConditionedEnvironmentSampler(const EnvironmentModel& model, int n, double threshold, bool allow_bridge = true);

    struct Draw {
        EnvRealization env;
        /// log(1 - F_{j,n}(0)), j = 0..n.
        std::vector<double> log_survival;
    };

    std::optional<Draw> draw(Rng& rng) const;
    bool bridged() const noexcept { return bridged_; }
    /// Total mass of the proposal; P(S_n <= x, Z_n > 0) = mass * acceptance rate.
    double proposal_mass() const noexcept { return mass_pos_ + mass_neg_; }

private:
    EnvironmentModel model_;
    int n_;
    double threshold_;
    bool bridged_;
    double variance_ = 0.0;
    double mass_pos_ = 1.0;
    double mass_neg_ = 0.0;
};

/// (Z_r, Z_{r,n}) given the environment and survival to n: surviving and
/// doomed lineages are grown generation by generation (Y_j surviving,
/// D_j doomed) so that no rejection is involved. Fills Z_r, Z_rn, q_rn,
/// log_survival and the diagnostics.
ReducedSample sample_population_given_survival(const EnvRealization& env, std::span<const double> log_survival, int r,
                                               Rng& rng, double eta);

enum class SamplerKind { kPlain, kFast };

struct ConditionedRun {
    std::vector<ReducedSample> samples;
    std::uint64_t trials = 0;
    std::size_t accepted_total = 0;
    std::uint64_t discarded = 0;
    /// Estimate of P(S_n <= x, Z_n > 0) and its standard error.
    double p_event = 0.0;
    double p_event_se = 0.0;
    bool exhausted = false;
};

/// Runs trials in fixed-size waves of blocks until `target_accepted` samples
/// are collected; output is the first target_accepted samples by trial index,
/// identical for every thread count.
ConditionedRun run_conditioned(const ScenarioSpec& scenario, unsigned threads = 1,
                               SamplerKind kind = SamplerKind::kFast);

void write_samples_csv(std::ostream& out, std::span<const ReducedSample> samples);

// ---------------------------------------------------------------------------
// Exact enumeration on tiny instances.

struct DiscreteLaw {
    std::vector<double> values;
    std::vector<double> probs;
};

struct TinyOutcome {
    double s_n = 0.0;
    int z_r = 0;
    int z_rn = 0;
    bool survives = false;
    double prob = 0.0;
};

struct TinyLaw {
    std::vector<TinyOutcome> outcomes;
    double total_mass = 0.0;
    int population_cap = 0;

    /// Law of the outcome {rejected} or (Z_r, Z_rn) for {S_n <= x, Z_n > 0};
    /// the rejected bucket has key (-1, -1).
    std::map<std::pair<int, int>, double> conditioned(double x) const;
    double survival_probability() const;
};

/// Enumerates every environment sequence and the exact population law
/// (truncated at a cap chosen so the lost mass stays below 1e-13).
/// Throws StateSpaceTooLarge past `state_limit`.
TinyLaw brute_force_tiny(const DiscreteLaw& law, Family family, int n, int r, int z0 = 1, double state_limit = 1e7);

/// Full genealogy of a small population: Z_0..Z_n and Z_{r,n} for r = 0..n.
struct TreeProfile {
    std::vector<int> z;
    std::vector<int> reduced;
};

TreeProfile simulate_tree(const EnvRealization& env, Rng& rng, int z0 = 1, int max_individuals = 1'000'000);

// ---------------------------------------------------------------------------
// The constant Theta in P(S_n <= x, Z_n > 0) ~ Theta P(S_n <= x, L_n >= 0).

struct ThetaOptions {
    std::vector<int> n_grid{1000, 2000, 4000};
    double k_exponent = 0.65;
    double t = 1.0;
    /// Conditioned-sampler trials per n for P(R).
    std::uint64_t r_trials = 2'000'000;
    /// Trials per n for P(B).
    std::size_t b_trials = 4'000'000;
    /// Series truncation in j; contributions with Z_j above `series_k` use
    /// the exact survival weight but are counted in the report.
    int series_j = 2000;
    int series_k = 1000;
    std::size_t series_paths = 200'000;
    /// Environments drawn from P+ for the survival weights, and their length.
    std::size_t plus_envs = 4000;
    int plus_horizon = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ThetaRatio {
    int n = 0;
    int k = 0;
    double x = 0.0;
    double p_r = 0.0, p_r_se = 0.0;
    double p_b = 0.0, p_b_se = 0.0;
    double ratio = 0.0, ratio_se = 0.0;
};

struct ThetaEstimate {
    std::vector<ThetaRatio> ratios;
    double series = 0.0;
    double series_se = 0.0;
    int series_j = 0;
    int series_k = 0;
    /// Contributions whose Z_j exceeded series_k.
    std::uint64_t above_k = 0;
    /// sum_{j > J} E[e^{S_j}; M_j < 0], a bound on the series tail.
    double truncation_mass = 0.0;
    /// sum_j P(Z_j > 0, tau_j = j) within the same truncation (simulated).
    double survival_bound = 0.0;
    /// sum_j E[e^{S_j}; M_j < 0].
    double sparr_bound = 0.0;
};

ThetaEstimate estimate_theta(const EnvironmentModel& model, const RenewalTable& table, const ThetaOptions& options);

/// The series alone: sum_{j <= J} E[1{tau_j = j, Z_j > 0} h(Z_j)] with
/// h(i) = E+[1 - F_{0,inf}(0)^i], plus its standard error.
struct ThetaSeries {
    double value = 0.0;
    double std_error = 0.0;
    double survival_bound = 0.0;
    std::uint64_t above_k = 0;
};
ThetaSeries theta_series(const EnvironmentModel& model, const RenewalTable& table, const ThetaOptions& options);

/// h(i) = E+[1 - q^i] from sampled extinction probabilities q of P+ environments.
std::vector<double> plus_extinction_samples(const EnvironmentModel& model, const RenewalTable& table,
                                            std::size_t n_envs, int horizon, std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Diagnostics of accepted batches.

struct DiagnosticsReport {
    std::size_t samples = 0;
    double a_m = 0.0;
    /// 95th percentiles (with 99% order-statistic intervals).
    double delta_q95 = 0.0, delta_q95_low = 0.0, delta_q95_high = 0.0;
    double log_o_q95 = 0.0;
    double binom_q95 = 0.0, binom_q95_low = 0.0, binom_q95_high = 0.0;
    double binom_below_2 = 0.0;
    double ratio_q05 = 0.0, ratio_median = 0.0, ratio_q95 = 0.0;  // log(Z_r / e^{S_r})
    /// max |Delta - (log Z_r + log_survival - S_tau)|.
    double delta_recompute_error = 0.0;
};

/// Needs at least `min_samples` samples (InsufficientSamples).
DiagnosticsReport diagnostics_check(std::span<const ReducedSample> samples, const Schedule& schedule, double alpha,
                                    std::size_t min_samples = 1000);

} // namespace rbpre
