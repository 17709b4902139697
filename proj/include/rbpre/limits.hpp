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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rbpre/stable.hpp"

namespace rbpre {

/// A limit-law value with its error estimate (99% Monte Carlo half-width
/// plus quadrature error, whichever apply).
struct LawValue {
    double value = 0.0;
    double error = 0.0;
};

/// P(min_{[0,1]} Y <= z), z <= 0. Closed form 2 Phi(z / sigma) at alpha = 2;
/// otherwise read from the ensemble with a DKW half-width.
LawValue q_min(const StableSpec& spec, double z, const PathEnsemble* ensemble = nullptr);

/// A(T, y) = (ar+1)/T^{ar+1} int_0^inf w^{ar} P(-w <= min Y <= y-w; Y_1 <= T-w) dw,
/// ar = alpha rho, 0 <= y <= T. The w-integral is done per path in closed
/// form: each (min, end) pair contributes ((hi)^{ar+1} - (lo)^{ar+1}) / T^{ar+1}
/// over w in [-min, min(y - min, T - end)], so only the ensemble average is
/// approximate.
LawValue a_limit(const StableSpec& spec, double T, double y, const PathEnsemble& ensemble);

/// The composite law of the intermediate regime, A(theta^{1/alpha} t, theta^{1/alpha} (t ^ y)).
LawValue a_limit_scaled(const StableSpec& spec, double theta, double t, double y, const PathEnsemble& ensemble);

/// A2(t, theta, z) = (ar+1)/t^{ar+1} int_0^{t+z} v^{ar}
///   P(-v theta^{1/alpha} <= min Y, -z theta^{1/alpha} <= Y_1 <= (t - v) theta^{1/alpha}) dv,
/// for z > -t (z = +inf allowed). Per-path closed form as for a_limit.
LawValue a2_limit(const StableSpec& spec, double t, double theta, double z, const PathEnsemble& ensemble);

/// Meander density on a grid; the tables from meander_density() fit here.
struct MeanderGrid {
    std::vector<double> z;
    std::vector<double> density;
};

MeanderGrid meander_grid(const MeanderTable& table);
/// Time-one Brownian meander density z e^{-z^2/2} (alpha = 2 reference).
MeanderGrid rayleigh_meander(std::span<const double> z);

struct CstarH {
    double cstar = 0.0;
    double cstar_h = 0.0;  // C** H(y)
};

/// C** = (int g+(z) z^{alpha(1-rho)} dz)^{-1} and C** H(y) with
/// H(y) = int g+(z) (z^{a} - (z - y ^ z)^{a}) dz, both by the trapezoid rule on
/// the grid (the segment [0, z_0] included), so C** H(inf) = 1 up to rounding.
CstarH cstar_and_h(const StableSpec& spec, const MeanderGrid& meander, double y);

/// W(t, y), 0 <= y <= t, as nested quadrature: the inner q-integrals by
/// adaptive Gauss-Kronrod (the q^{a-1} endpoint singularity removed with
/// q = u^{1/a}), the outer z-integral by the trapezoid rule on the grid.
LawValue w_limit(const StableSpec& spec, double t, double y, const MeanderGrid& meander);

/// W(theta^{1/alpha} t, theta^{1/alpha} t ^ y).
LawValue w_limit_scaled(const StableSpec& spec, double theta, double t, double y, const MeanderGrid& meander);

/// 1 - (1 - (t ^ y)/t)^{ar+1} for y >= 0 (0 for y < 0).
double tail_closed_form(double t, double y, double alpha_rho);

/// P(inf_{s <= q <= 1} meander_q <= x) from `n_paths` walks of length
/// `grid_size` conditioned to stay nonnegative (alpha = 2 only).
LawValue meander_min_after(double s, double x, std::size_t n_paths, std::uint64_t seed, int grid_size = 1000,
                           unsigned threads = 1);

struct LawEntry {
    double arg1 = 0.0;
    double arg2 = 0.0;
    double value = 0.0;
    double error = 0.0;
};

/// Tabulated limit law. arg2 is the distribution argument; arg1 the fixed
/// parameter (T, t or s).
struct LimitLawTable {
    std::string law_id;
    std::string method;
    std::vector<LawEntry> entries;

    /// Values in [0,1] within error and nondecreasing in arg2 within error.
    bool valid_subcdf(double slack = 0.0) const;
    /// Linear interpolation in arg2 (entries sorted by arg2), clamped.
    double cdf(double x) const;
    void write_csv(std::ostream& out, bool header = true) const;
};

LimitLawTable tabulate(std::string law_id, std::string method, double arg1, std::span<const double> args,
                       const std::function<LawValue(double)>& law);

} // namespace rbpre
