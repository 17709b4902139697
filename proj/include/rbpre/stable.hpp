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

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rbpre/rng.hpp"

namespace rbpre {

/// Strictly stable law with characteristic function
///   exp{-c |w|^alpha (1 - i beta sign(w) tan(pi alpha / 2))}.
/// Admissible parameters: alpha in (0,2)\{1} with |beta| < 1, or
/// alpha = 1 with beta = 0, or alpha = 2 with beta = 0; c > 0.
class StableSpec {
public:
    StableSpec(double alpha, double beta, double c);

    /// Scale convention used throughout: c = 1/2 for alpha = 2 (so the
    /// time-one marginal is standard normal), c = 1 otherwise.
    static StableSpec preset(double alpha, double beta = 0.0);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double c() const noexcept { return c_; }
    /// P(Y_1 > 0), from the closed form 1/2 + atan(beta tan(pi alpha/2))/(pi alpha).
    double rho() const noexcept { return rho_; }
    /// beta * tan(pi alpha / 2); zero for alpha in {1, 2}.
    double skew() const noexcept { return skew_; }
    /// c^{1/alpha}.
    double scale() const noexcept { return scale_; }
    bool gaussian() const noexcept { return alpha_ == 2.0; }
    /// Standard deviation of one increment when gaussian().
    double sigma() const;

    std::complex<double> characteristic(double w) const;

    bool operator==(const StableSpec&) const = default;

private:
    double alpha_;
    double beta_;
    double c_;
    double rho_;
    double skew_;
    double scale_;
};

/// Chambers-Mallows-Stuck draw (normal / Cauchy at the special points).
double sample_increment(const StableSpec& spec, Rng& rng);

/// Density by Fourier inversion, adaptive quadrature over [0, W_max] with
/// the integrand tail below 1e-10. Throws QuadratureError.
double stable_density(const StableSpec& spec, double x);

/// P(Y_1 > 0) by numerical Gil-Pelaez inversion (the Fourier form of the
/// density integral over (0, inf)). Throws QuadratureError.
double positivity_rho(const StableSpec& spec);

/// a_n = n^{1/alpha} (slowly varying factor fixed to 1).
double norming(double alpha, double n);
inline double norming(const StableSpec& spec, double n) { return norming(spec.alpha(), n); }

/// Law of one environment increment X = log F'(1). Either a stable law or
/// a finite two-point law; the latter only serves exact-enumeration oracles.
class IncrementLaw {
public:
    IncrementLaw(const StableSpec& spec); // NOLINT(google-explicit-constructor)
    static IncrementLaw two_point(double low, double high, double p_high);

    bool is_stable() const noexcept { return stable_; }
    const StableSpec& stable() const;
    bool gaussian() const noexcept { return stable_ && spec_.gaussian(); }

    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }
    double p_high() const noexcept { return p_high_; }

    double sample(Rng& rng) const { return stable_ ? sample_increment(spec_, rng) : (rng.uniform() < p_high_ ? high_ : low_); }

private:
    IncrementLaw(double low, double high, double p_high);

    bool stable_;
    StableSpec spec_;
    double low_ = 0.0;
    double high_ = 0.0;
    double p_high_ = 0.0;
};

struct StablePath {
    int grid_size = 0;
    /// Y(j / grid_size), j = 0..grid_size; values.front() == 0.
    std::vector<double> values;
};

StablePath sample_path(const StableSpec& spec, int grid_size, Rng& rng);

/// Independent draws of (min_{[0,1]} Y, Y_1). For alpha = 2 the pair is
/// sampled exactly (endpoint plus Brownian-bridge minimum), otherwise from a
/// random-walk skeleton on `grid_size` steps, whose minimum is biased upward
/// by O(grid_size^{-1/alpha}).
class PathEnsemble {
public:
    PathEnsemble(std::vector<double> minima, std::vector<double> endpoints, int grid_size, bool exact);

    std::size_t size() const noexcept { return minima_.size(); }
    int grid_size() const noexcept { return grid_size_; }
    bool exact() const noexcept { return exact_; }
    std::span<const double> minima() const noexcept { return minima_; }
    std::span<const double> endpoints() const noexcept { return endpoints_; }

    /// Empirical P(min <= z).
    double prob_min_le(double z) const;
    /// Empirical P(min_lo <= min <= min_hi, end <= end_hi).
    double joint(double min_lo, double min_hi, double end_hi) const;
    /// Hoeffding half-width for any single event at confidence 1 - delta.
    double halfwidth(double delta = 0.01) const;

private:
    std::vector<double> minima_;
    std::vector<double> endpoints_;
    std::vector<double> sorted_minima_;
    int grid_size_;
    bool exact_;
};

PathEnsemble min_and_endpoint_sampler(const StableSpec& spec, int grid_size, std::size_t n_paths, std::uint64_t seed,
                                      unsigned threads = 1);

struct MeanderOptions {
    /// Walk length L; endpoints are scaled by a_L.
    int length = 10000;
    /// Kernel bandwidth; 0 selects Silverman's rule.
    double bandwidth = 0.0;
    /// Rejection attempts allowed per accepted path.
    std::uint64_t max_attempts_per_path = 1'000'000;
    unsigned threads = 1;
};

struct MeanderTable {
    std::vector<double> z;
    std::vector<double> density;
    /// Scaled endpoints S_L / a_L of the accepted walks.
    std::vector<double> endpoints;
    int length = 0;
    double bandwidth = 0.0;
    std::uint64_t attempts = 0;

    double acceptance_rate() const { return attempts ? static_cast<double>(endpoints.size()) / static_cast<double>(attempts) : 0.0; }
    /// Trapezoid integral of the density over the grid, with the segment
    /// [0, z.front()] included (the meander density vanishes at 0).
    double integral() const;
};

/// Draws one walk of `length` steps conditioned on min_{j<=L} S_j >= 0 by
/// restarting at the first negative value. Returns attempts used; fills
/// `path` with S_0..S_L. Throws InsufficientSamples after `max_attempts`.
std::uint64_t sample_nonnegative_walk(const IncrementLaw& law, int length, Rng& rng, std::vector<double>& path,
                                      std::uint64_t max_attempts);

/// Time-one density of the stable meander, estimated from walks of length L
/// conditioned to stay nonnegative (rejection with early termination) and an
/// odd-reflected Gaussian kernel estimate, which pins g+(0) = 0.
MeanderTable meander_density(const StableSpec& spec, std::span<const double> z_grid, std::size_t n_paths,
                             std::uint64_t seed, const MeanderOptions& options = {});

} // namespace rbpre
