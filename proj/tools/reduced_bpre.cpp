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

// reduced_bpre: run one scenario and write samples, limit-law table and
// report. Exit status: 0 all rows pass, 1 some row failed, 2 usage or
// configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rbpre/cli.hpp"
#include "rbpre/errors.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Reduced branching processes in random environment: conditioned simulation and limit laws"};
    app.set_version_flag("--version", std::string(rbpre::version_string()));

    std::string config_file;
    bool print_config = false;
    app.add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

    // Flag name -> config key. Values stay strings so the file and the flags
    // share one parser.
    const std::vector<std::pair<std::string, std::string>> flags{
        {"--scenario", "scenario"}, {"--n", "n"},         {"--k", "k"},
        {"--r", "r"},               {"--m", "m"},         {"--ladder", "ladder"},
        {"--theta", "theta"},       {"--t", "t"},         {"--alpha", "alpha"},
        {"--beta", "beta"},         {"--env", "env"},     {"--trials", "trials"},
        {"--target-accepted", "target_accepted"},         {"--seed", "seed"},
        {"--threads", "threads"},   {"--out-dir", "out_dir"}, {"--format", "format"},
        {"--paths", "paths"},       {"--grid", "grid"},   {"--sequences", "sequences"},
        {"--excursions", "excursions"}, {"--height", "height"}};
    std::map<std::string, std::string> values;
    for (const auto& [flag, key] : flags) app.add_option(flag, values[key], "config key " + key);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rbpre::KeyValues file;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            std::stringstream buf;
            buf << in.rdbuf();
            file = rbpre::parse_key_values(buf.str());
        }
        rbpre::KeyValues overrides;
        for (const auto& [flag, key] : flags)
            if (app.count(flag) > 0) overrides[key] = values[key];
        auto config = rbpre::parse_config(file, overrides);
        rbpre::apply_thread_override(config, std::getenv("REDUCED_BPRE_THREADS"));
        if (print_config) {
            std::cout << rbpre::emit_config(config);
            return 0;
        }
        const auto result = rbpre::run_scenario(config);
        const auto report = (std::filesystem::path(config.out_dir) / ("report." + config.format)).string();
        const int code = rbpre::emit_report(result, config, report);
        for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
        std::cout << "wrote " << report << "\n";
        if (code != 0) {
            std::cout << "failing rows:\n";
            for (const auto& r : result.rows)
                if (!r.pass)
                    std::cout << "  " << r.scenario << " n=" << r.n << " " << r.statistic << " = " << r.value
                              << " (" << r.reference << ")\n";
        }
        return code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
