// Copyright 2026 The weakclone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: run | sweep | chain | qudit.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "weakclone/error.hpp"
#include "weakclone/experiments.hpp"

namespace {

struct Subcommand {
    CLI::App *app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    std::string config_path;
};

void add_options(Subcommand &sub) {
    static const std::map<std::string, std::string> help = {
        {"scheme", "weakclone | sequential"},
        {"state", "interleaved re,im amplitudes of the unknown state"},
        {"obs-a", "Alice's observable: sx | sy | sz | h:re,im,..."},
        {"obs-b", "Bob's observable"},
        {"obs-list", "';'-separated observables, one per chain party"},
        {"gamma", "coupling strength (comma list for sweep)"},
        {"gamma-a", "Alice's coupling strength"},
        {"gamma-b", "Bob's coupling strength"},
        {"delta", "pointer position width"},
        {"repr", "grid | gaussian | both"},
        {"grid-n", "grid samples per pointer (power of two)"},
        {"grid-l", "grid half width"},
        {"seed", "seed for random states and observables"},
        {"out", "output path (default stdout)"},
        {"format", "csv | jsonl"},
        {"parties", "number of chain parties"},
        {"dim", "qudit dimension"},
        {"layout", "alice-holds-pair | bob-holds-pair"},
        {"order", "alice-first | bob-first"},
    };
    for (const auto &name : weakclone::option_names()) {
        sub.values[name];
        sub.options[name] = sub.app->add_option("--" + name, sub.values[name], help.at(name));
    }
    sub.app->add_option("--config", sub.config_path, "flat JSON config file mirroring flag names");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Weak cloning protocol simulator"};
    app.require_subcommand(1);
    std::map<std::string, Subcommand> subs;
    for (const char *name : {"run", "sweep", "chain", "qudit"}) {
        Subcommand &sub = subs[name];
        sub.app = app.add_subcommand(name);
        add_options(sub);
    }
    subs["run"].app->description("single protocol run, one JSON report");
    subs["sweep"].app->description("gamma convergence sweep, CSV with fitted slopes");
    subs["chain"].app->description("multi-party chain, JSON lines");
    subs["qudit"].app->description("N-dimensional scheme, JSON lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return weakclone::kExitConfig;
    }

    for (auto &[name, sub] : subs) {
        if (!sub.app->parsed()) {
            continue;
        }
        weakclone::ExperimentSpec spec;
        try {
            std::map<std::string, std::string> config;
            if (!sub.config_path.empty()) {
                std::ifstream in(sub.config_path);
                if (!in) {
                    throw weakclone::Error(weakclone::Errc::config, "cannot open " + sub.config_path);
                }
                nlohmann::json j;
                try {
                    in >> j;
                } catch (const nlohmann::json::exception &e) {
                    throw weakclone::Error(weakclone::Errc::config, e.what());
                }
                config = weakclone::config_options(j);
            }
            std::map<std::string, std::string> flags;
            for (const auto &[key, opt] : sub.options) {
                if (opt->count() > 0) {
                    flags[key] = sub.values[key];
                }
            }
            spec = weakclone::resolve_spec(name, config, flags);
        } catch (const weakclone::Error &e) {
            std::cerr << "error: " << e.what() << '\n';
            return weakclone::kExitConfig;
        }

        if (spec.out) {
            std::ofstream file(*spec.out);
            if (!file) {
                std::cerr << "error: cannot write " << *spec.out << '\n';
                return weakclone::kExitConfig;
            }
            return weakclone::run_experiment(spec, file, std::cerr);
        }
        return weakclone::run_experiment(spec, std::cout, std::cerr);
    }
    return weakclone::kExitConfig;
}
