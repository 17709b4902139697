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

#include "rbpre/rng.hpp"

namespace rbpre {

/// Counts are carried as doubles. Draws are exact (integer-valued, from the
/// stated law) while the count and mean stay below this limit; beyond it a
/// moment-matched normal approximation, rounded to an integer, is used.
inline constexpr double kExactCountLimit = 1e12;

double sample_poisson(double mean, Rng& rng);

/// Sum of `count` i.i.d. geometric variables with P(k) = (1 - pi) pi^k.
double sample_negative_binomial(double count, double pi, Rng& rng);

double sample_binomial(double count, double p, Rng& rng);

/// Poisson(mu) conditioned on being >= 1.
double sample_zt_poisson(double mu, Rng& rng);

/// Sum of `count` i.i.d. zero-truncated Poisson(mu) draws: exact up to 1000
/// terms, moment-matched normal beyond.
double sample_zt_poisson_sum(double count, double mu, Rng& rng);

} // namespace rbpre
