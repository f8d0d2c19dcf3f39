// Copyright 2026 The fluxcz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxcz/fluxcz.hpp"

#ifndef FLUXCZ_PRESET_DIR
#define FLUXCZ_PRESET_DIR "presets"
#endif

int main(int argc, char **argv) {
    CLI::App app{"fluxcz: fluxonium-coupler-fluxonium CZ gate simulator"};
    std::string config_path;
    std::vector<std::string> stages;
    std::vector<std::string> presets;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string preset_dir = FLUXCZ_PRESET_DIR;
    int workers = 0;
    bool quiet = false;
    bool list = false;

    app.add_option("-c,--config", config_path, "JSON config file (comments allowed)");
    app.add_option("-s,--stage", stages, "stage(s) to run, in order");
    app.add_option("-p,--preset", presets, "preset name merged before the config body")->take_all();
    app.add_option("-o,--override", overrides, "dotted override, e.g. pulse.t_gate=80")->take_all();
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--preset-dir", preset_dir, "directory holding <name>.json presets");
    app.add_option("-j,--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("-q,--quiet", quiet, "only print the output paths");
    app.add_flag("--list-stages", list, "print the stage names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (list) {
        for (const auto &s : fluxcz::stage_names()) {
            std::cout << s << "\n";
        }
        return 0;
    }
    if (stages.empty()) {
        std::cerr << "error: at least one --stage is required\n";
        return 2;
    }
    if (!out_dir.empty()) {
        overrides.push_back("output.dir=" + fluxcz::json(out_dir).dump());
    }
    if (workers > 0) {
        overrides.push_back("workers=" + std::to_string(workers));
    }

    try {
        fluxcz::Pipeline pipe(fluxcz::load_config(config_path, preset_dir, presets, overrides));
        for (const auto &stage : stages) {
            const fluxcz::json bundle = pipe.run(stage);
            if (quiet) {
                std::cout << pipe.config().output_dir << "/" << stage << ".json\n";
            } else {
                std::cout << fluxcz::json{{"stage", stage},
                                          {"wall_seconds", bundle["timing"]["wall_seconds"]},
                                          {"result", bundle["result"]}}
                                 .dump(2)
                          << "\n";
            }
        }
    } catch (const fluxcz::ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fluxcz::NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
