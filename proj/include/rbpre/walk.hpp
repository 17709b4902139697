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
#include <span>
#include <string>
#include <vector>

#include "rbpre/rng.hpp"
#include "rbpre/stable.hpp"

namespace rbpre {

/// Increments X_1..X_n and prefix sums S_0 = 0, S_1..S_n.
struct WalkPath {
    std::vector<double> increments;
    std::vector<double> prefix{0.0};

    int steps() const noexcept { return static_cast<int>(increments.size()); }
    double back() const noexcept { return prefix.back(); }

    static WalkPath from_increments(std::vector<double> increments, double start = 0.0);
    void push(double x)
    {
        increments.push_back(x);
        prefix.push_back(prefix.back() + x);
    }
};

WalkPath simulate_walk(const IncrementLaw& law, int n, Rng& rng);

struct MinStats {
    double min = 0.0;  // L_{r,n}
    int argmin = 0;    // first index attaining it
    double max = 0.0;  // M_n = max_{1<=i<=n} S_i (S_0 when n = 0)
};

MinStats min_stats(const WalkPath& path, int r);

/// Weak ladder decomposition. Epoch 0 (height 0) is implicit and not stored.
struct LadderStats {
    std::vector<int> weak_desc_epochs;
    std::vector<int> weak_asc_epochs;
    /// Descending heights are reported as positive distances below S_0.
    std::vector<double> desc_heights;
    std::vector<double> asc_heights;
    /// Fraction of weak ascending ladder steps with zero height gain.
    double zeta_estimate = 0.0;

    /// Strict ladders: weak epochs whose height moves strictly.
    std::vector<int> strict_asc_epochs() const;
    std::vector<int> strict_desc_epochs() const;
};

LadderStats ladder_decompose(const WalkPath& path);

enum class Direction { kAscending, kDescending };

struct LadderOptions {
    /// Steps allowed per ladder excursion before it is discarded and redrawn.
    std::uint64_t excursion_cap = 1'000'000;
    unsigned threads = 1;
};

/// Independent ladder-height sequences H_1 <= H_2 <= ... (weak ladders),
/// each followed until the height first exceeds `max_height`.
struct LadderHeightSamples {
    std::vector<std::vector<double>> ascending;
    std::vector<std::vector<double>> descending;
    double max_height = 0.0;
    /// Excursions that hit the step cap and were redrawn.
    std::uint64_t censored = 0;
    std::uint64_t ascending_steps = 0;
    std::uint64_t ascending_ties = 0;

    double zeta() const
    {
        return ascending_steps ? static_cast<double>(ascending_ties) / static_cast<double>(ascending_steps) : 0.0;
    }
};

LadderHeightSamples sample_ladder_heights(const IncrementLaw& law, double max_height, std::size_t n_sequences,
                                          std::uint64_t seed, const LadderOptions& options = {});

enum class LadderKind { kWeak, kStrict };

/// Estimated renewal functions V+(x), V-(x) on a grid. Beyond the grid the
/// columns are extended as power laws with the stated exponents (alpha*rho
/// and alpha*(1-rho) in the stable domain).
class RenewalTable {
public:
    RenewalTable(std::vector<double> grid, std::vector<double> v_plus, std::vector<double> v_minus, double zeta,
                 std::size_t n_samples, double plus_exponent = 1.0, double minus_exponent = 1.0);

    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> v_plus() const noexcept { return v_plus_; }
    std::span<const double> v_minus() const noexcept { return v_minus_; }
    double zeta() const noexcept { return zeta_; }
    std::size_t n_samples() const noexcept { return n_samples_; }
    double plus_exponent() const noexcept { return plus_exponent_; }
    double minus_exponent() const noexcept { return minus_exponent_; }
    double max() const noexcept { return grid_.back(); }

    /// Linear interpolation; power-law extension above the grid. Negative
    /// arguments give 0. Throws DomainError for NaN.
    double plus_at(double x) const;
    double minus_at(double x) const;
    /// int_0^x V+(u) du (trapezoid on the grid, analytic beyond it).
    double plus_integral(double x) const;

    void write_csv(std::ostream& out) const;
    static RenewalTable read_csv(std::istream& in);

    bool operator==(const RenewalTable&) const = default;

private:
    static double lookup(std::span<const double> grid, std::span<const double> v, double exponent, double x);

    std::vector<double> grid_;
    std::vector<double> v_plus_;
    std::vector<double> v_minus_;
    double zeta_;
    std::size_t n_samples_;
    double plus_exponent_;
    double minus_exponent_;
};

/// V(x) = E #{k >= 0 : H_k <= x}; strict ladders drop the zero-gain steps.
/// Requires at least `min_sequences` sequences (InsufficientSamples).
RenewalTable estimate_renewal(const LadderHeightSamples& samples, std::span<const double> grid,
                              LadderKind kind = LadderKind::kWeak, double plus_exponent = 1.0,
                              double minus_exponent = 1.0, std::size_t min_sequences = 1000);

/// Convenience: ladder sampling plus estimation with stable exponents.
RenewalTable renewal_for(const StableSpec& spec, double max_height, std::size_t n_sequences, std::uint64_t seed,
                         std::size_t grid_points = 201, const LadderOptions& options = {});

/// (alpha*rho + 1) int_0^x V+ / (x V+(x)). Throws DomainError outside (0, grid max].
double asympv_ratio(const RenewalTable& table, double x, double alpha_rho);

/// Empirical P(tau_1 > n) at the requested abscissae, tau_1 the first weak
/// ladder epoch in `direction`. Excursions are followed up to max(abscissae).
std::vector<double> ladder_epoch_tail(const IncrementLaw& law, Direction direction, std::span<const int> abscissae,
                                      std::size_t n_excursions, std::uint64_t seed, unsigned threads = 1);

enum class ConditionMethod { kRejection, kHTransform };

struct ConditionOptions {
    ConditionMethod method = ConditionMethod::kHTransform;
    /// Upward jump bound used for the h-transform envelope; 0 selects a
    /// default (8 sigma for gaussian increments, a far tail quantile otherwise).
    /// Larger jumps are accepted with probability one, a bias of the size of
    /// their probability.
    double jump_bound = 0.0;
    std::uint64_t max_attempts = 10'000'000;
};

/// One path from P+_{x0} restricted to n steps: the walk started at x0,
/// killed below zero and reweighted by V-(S_n)/V-(x0). The rejection
/// method draws a nonnegative path and accepts with V-(S_n)/V-(cap), cap a
/// far quantile of S_n; the h-transform method runs the Doob chain step by step.
WalkPath conditioned_sample_positive(const IncrementLaw& law, int n, double x0, const RenewalTable& table, Rng& rng,
                                     const ConditionOptions& options = {});

double default_jump_bound(const IncrementLaw& law);

struct EventBResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double prediction = 0.0;
    std::size_t trials = 0;

    double ratio() const { return prediction > 0 ? estimate / prediction : 0.0; }
    /// 99% interval for estimate / prediction.
    double ratio_halfwidth() const { return prediction > 0 ? 2.5758 * std_error / prediction : 0.0; }
};

/// P(S_n <= x, L_n >= 0) by simulation, next to g(0) V-(0) b_n int_0^x V+.
/// Gaussian increments use the exact last-step conditional probability
/// (variance reduction); other laws use the plain indicator.
EventBResult event_b_probability(const StableSpec& spec, double x, int n, std::size_t n_trials, std::uint64_t seed,
                                 const RenewalTable& table, unsigned threads = 1);

/// b_n = 1 / (n a_n).
double b_sequence(const StableSpec& spec, double n);

/// Coefficients E[e^{S_j}; M_j < 0], j = 0..J, from the Baxter-Spitzer
/// identity sum_j s^j E[e^{S_j}; M_j < 0] = exp(sum_n s^n/n E[e^{S_n}; S_n < 0]),
/// with the inner expectation evaluated by Fourier quadrature.
std::vector<double> exp_functional_series(const StableSpec& spec, int max_j);

/// sum_{j >= 0} E[e^{S_j}; M_j < 0] (the Theta upper bound).
double exp_functional_total(const StableSpec& spec);

struct MonteCarloValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// Plain simulation of E[e^{S_j}; M_j < 0], stopping paths once they hit 0.
MonteCarloValue exp_functional_mc(const IncrementLaw& law, int j, std::size_t n_samples, std::uint64_t seed,
                                  unsigned threads = 1);

} // namespace rbpre
