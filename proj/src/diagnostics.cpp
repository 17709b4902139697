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

#include "rbpre/bpre.hpp"
#include "rbpre/errors.hpp"
#include "rbpre/stats.hpp"

namespace rbpre {

DiagnosticsReport diagnostics_check(std::span<const ReducedSample> samples, const Schedule& schedule, double alpha,
                                    std::size_t min_samples)
{
    if (samples.size() < std::max<std::size_t>(min_samples, 2))
        throw InsufficientSamples("diagnostics need at least " + std::to_string(min_samples) + " samples");
    DiagnosticsReport rep;
    rep.samples = samples.size();
    rep.a_m = norming(alpha, schedule.m());
    std::vector<double> delta, log_o, binom, ratio;
    std::size_t below = 0;
    for (const auto& s : samples) {
        delta.push_back(std::abs(s.Delta_rn) / rep.a_m);
        log_o.push_back(std::log(s.O_rn) / rep.a_m);
        const double mean = std::exp(std::log(s.Z_r) + s.log_survival);
        const double dev = std::abs(s.Z_rn - mean) / std::sqrt(mean);
        binom.push_back(dev);
        if (dev < 2.0) ++below;
        ratio.push_back(std::log(s.Z_r) - s.S_r);
        const double recomputed = std::log(s.Z_r) + s.log_survival - s.S_tau;
        rep.delta_recompute_error = std::max(rep.delta_recompute_error, std::abs(recomputed - s.Delta_rn));
    }
    const auto d = quantile_ci(delta, 0.95);
    rep.delta_q95 = d.value;
    rep.delta_q95_low = d.ci_low;
    rep.delta_q95_high = d.ci_high;
    rep.log_o_q95 = quantile_ci(log_o, 0.95).value;
    const auto b = quantile_ci(binom, 0.95);
    rep.binom_q95 = b.value;
    rep.binom_q95_low = b.ci_low;
    rep.binom_q95_high = b.ci_high;
    rep.binom_below_2 = static_cast<double>(below) / static_cast<double>(samples.size());
    rep.ratio_q05 = quantile_ci(ratio, 0.05).value;
    rep.ratio_median = quantile_ci(ratio, 0.5).value;
    rep.ratio_q95 = quantile_ci(ratio, 0.95).value;
    return rep;
}

} // namespace rbpre
