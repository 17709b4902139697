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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rbpre/bpre.hpp"
#include "rbpre/stats.hpp"
#include "rbpre/walk.hpp"

namespace rbpre {

/// Everything a run needs. Defaults are the alpha = 2 preset, t = 1,
/// geometric (linear-fractional) offspring, 5000 accepted samples.
struct RunConfig {
    std::string scenario;
    int n = 1000;
    std::optional<int> k;
    std::optional<int> r;
    /// m = n - r; an alternative way to give r.
    std::optional<int> m;
    /// Further horizons for the trend check (the run always includes n).
    std::vector<int> ladder;
    double theta = 1.0;
    double t = 1.0;
    double alpha = 2.0;
    double beta = 0.0;
    /// Stable scale; empty selects the preset convention.
    std::optional<double> c;
    std::string env = "linear_fractional";
    std::uint64_t trials = 1'000'000'000;
    std::size_t target_accepted = 5000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::string format = "csv";
    /// Limit-law evaluation: ensemble paths and time steps.
    std::size_t paths = 100'000;
    int grid = 1000;
    /// walk_only: ladder-height sequences and ladder-epoch excursions.
    std::size_t sequences = 2000;
    std::size_t excursions = 100'000;
    /// walk_only: top of the renewal grid.
    double height = 100.0;

    bool operator==(const RunConfig&) const = default;
};

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` lines; '#' starts a comment. Duplicate keys and
/// lines without '=' are ConfigErrors.
KeyValues parse_key_values(std::string_view text);

/// Builds and validates. `overrides` (from flags) win over `file`. Unknown
/// keys, malformed values, a missing seed and regime-ordering violations are
/// ConfigErrors.
RunConfig parse_config(const KeyValues& file, const KeyValues& overrides = {});
RunConfig parse_config(std::string_view text);

/// Canonical `key = value` text; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// REDUCED_BPRE_THREADS, when set, replaces the configured thread count.
void apply_thread_override(RunConfig& config, const char* env_value);

StableSpec config_stable(const RunConfig& config);
EnvironmentModel config_model(const RunConfig& config);
/// The schedule actually used for horizon n.
ScenarioSpec config_scenario(const RunConfig& config, int n);

struct RunResult {
    std::vector<ReportRow> rows;
    std::vector<std::string> files;
    /// Some horizon ran out of trial budget before the target.
    bool exhausted = false;
};

struct WalkReport {
    RenewalTable weak;
    RenewalTable strict;
    std::vector<int> epochs;
    std::vector<double> epoch_tail;
    std::vector<ReportRow> rows;
};

/// Ladder/renewal checks on the increment law: tail index of the first
/// ascending ladder epoch (expected rho), the growth exponent of V+
/// (expected alpha rho), the AsympV ratio near the top of the grid and
/// strict V+ = (1 - zeta) weak V+.
WalkReport walk_report(const StableSpec& spec, int n, double max_height, std::size_t sequences,
                       std::size_t excursions, std::uint64_t seed, unsigned threads = 1);

/// Runs the scenario and writes samples, limit-law table and report into
/// config.out_dir. Outputs depend on (config, seed) only.
RunResult run_scenario(const RunConfig& config);

/// Writes report.csv or report.json. Throws ConfigError on empty rows.
/// Returns 0 when every row passes, 1 otherwise.
int emit_report(const RunResult& result, const RunConfig& config, const std::string& path);

std::string_view version_string();

} // namespace rbpre
