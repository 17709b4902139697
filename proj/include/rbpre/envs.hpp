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

#include <string_view>
#include <vector>

#include "rbpre/rng.hpp"
#include "rbpre/stable.hpp"

namespace rbpre {

/// Offspring-law families. Linear-fractional: f(s) = q/(1 - p s) with
/// p/q = e^X; Poisson: f(s) = exp(lambda (s - 1)) with lambda = e^X.
enum class Family { kLinearFractional, kPoisson };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

/// f''(1) / f'(1)^2 for the family (2 and 1 respectively).
double family_eta(Family family);

class EnvironmentModel {
public:
    EnvironmentModel(Family family, IncrementLaw increments, double b2_margin = 1.0);

    Family family() const noexcept { return family_; }
    const IncrementLaw& increments() const noexcept { return increments_; }
    double eta() const noexcept { return eta_; }
    double b2_margin() const noexcept { return b2_margin_; }

private:
    Family family_;
    IncrementLaw increments_;
    double eta_;
    double b2_margin_;
};

/// A drawn environment of horizon n. Offspring parameters are kept as the
/// log-means X_i themselves; p_i, q_i and lambda_i are derived on demand so
/// extreme X stays representable.
struct EnvRealization {
    Family family = Family::kLinearFractional;
    std::vector<double> increments;
    /// S_0 = 0, S_i = X_1 + ... + X_i.
    std::vector<double> prefix{0.0};

    int n() const noexcept { return static_cast<int>(increments.size()); }
    /// X_i, 1-based.
    double x(int i) const { return increments[static_cast<std::size_t>(i) - 1]; }
    /// Poisson lambda_i = e^{X_i}; linear-fractional p_i = e^{X_i} / (1 + e^{X_i}).
    double parameter(int i) const;
};

/// Throws EnvironmentOverflow if some |X_i| exceeds `overflow_limit`.
EnvRealization draw_environment(const EnvironmentModel& model, int n, Rng& rng, double overflow_limit = 700.0);
EnvRealization environment_from_increments(Family family, std::vector<double> increments);

/// Probability generating function. Linear-fractional `parameter` is p,
/// Poisson `parameter` is lambda. Throws DomainError for s outside [0,1].
double gf_eval(Family family, double parameter, double s);

struct GfDerivatives {
    double value, first, second;
};
GfDerivatives gf_derivatives(Family family, double parameter, double s);

struct Extinction {
    double q = 0.0;             // F_{r,n}(0)
    double log_survival = 0.0;  // log(1 - q)
};

/// F_{r,n}(0) by a backward sweep carried out on log(1 - F_{j,n}(0)).
Extinction extinction_backward(const EnvRealization& env, int r, int n);

/// u_j = log(1 - F_{j,n}(0)) for j = 0..n (u_n = 0).
std::vector<double> log_survival_profile(const EnvRealization& env, int n);

/// One backward step: log(1 - f_X(1 - e^u)) for the family at log-mean X.
double log_survival_step(Family family, double x, double u);

/// Exact linear-fractional survival (sum_{j=r}^n e^{S_r - S_j})^{-1}.
/// Throws DomainError for other families.
double survival_closed_form_lf(const EnvRealization& env, int r, int n);

/// (e^{-(S_n - S_r)} + eta sum_{q=r}^{n-1} e^{-(S_q - S_r)})^{-1}.
double survival_lower_bound(const EnvRealization& env, int r, int n, double eta);

} // namespace rbpre
