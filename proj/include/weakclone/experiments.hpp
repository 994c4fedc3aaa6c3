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

/**
 * @file
 * Experiment layer behind the command-line tool: option resolution (config
 * file plus flags), input parsing, convergence sweeps, slope fitting, and
 * CSV / JSON-lines serialization.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "weakclone/protocols.hpp"

namespace weakclone {

/// Least-squares slope of log(err) against log(gamma). Points with
/// err < 1e-13 are dropped as round-off floor; throws Errc::degenerate_fit
/// when fewer than three usable points remain, or any gamma <= 0.
double fit_convergence_slope(std::span<const std::pair<double, double>> points);

struct SweepRow {
    double gamma = 0.0;
    double est_a = 0.0;
    double exact_a = 0.0;
    double err_a = 0.0;
    double est_b = 0.0;
    double exact_b = 0.0;
    double err_b = 0.0;
    double ps_prob = 0.0;
    std::string representation;
};

inline constexpr const char *kSweepCsvHeader =
    "gamma,est_a,exact_a,err_a,est_b,exact_b,err_b,ps_prob,representation";

/// Runs one protocol per gamma (gamma_a = gamma_b = gamma) and returns rows
/// in descending gamma order. Needs at least three gammas, all positive.
std::vector<SweepRow> run_sweep(const ProtocolConfig &base, Scheme scheme, std::vector<double> gammas);

struct SweepSlopes {
    std::optional<double> slope_a;  // absent when the fit is degenerate
    std::optional<double> slope_b;
};
SweepSlopes sweep_slopes(std::span<const SweepRow> rows);

/// %.17g
std::string format_double(double v);

/// Header, one line per row, and the "# slope_a=<v> slope_b=<v>" footer.
std::string sweep_to_csv(std::span<const SweepRow> rows, const SweepSlopes &slopes);
std::string sweep_to_jsonl(std::span<const SweepRow> rows, const SweepSlopes &slopes);

nlohmann::json report_to_json(const RunReport &report);
nlohmann::json pointer_to_json(const PointerReport &pointer);

// ---------------------------------------------------------------------------
// Input parsing

struct ParsedState {
    StateVector state;
    bool renormalized = false;
};

/// Interleaved "re,im,re,im,..." amplitudes; normalized when the norm is off
/// by more than 1e-10. Throws Errc::config on malformed input.
ParsedState parse_state(const std::string &text);

/// "sx" | "sy" | "sz" (qubits) or "h:" followed by row-major re,im pairs.
HermitianObservable parse_observable(const std::string &text);

std::vector<double> parse_double_list(const std::string &text);

// ---------------------------------------------------------------------------
// Experiment specification

enum class OutputFormat { csv, jsonl };

struct ExperimentSpec {
    std::string subcommand;  // run | sweep | chain | qudit
    Scheme scheme = Scheme::weak_cloning;
    std::optional<std::string> state;
    std::optional<std::string> obs_a;
    std::optional<std::string> obs_b;
    std::optional<std::string> obs_list;  // ';'-separated, one per chain party
    std::vector<double> gammas{1e-3};
    std::optional<double> gamma_a;
    std::optional<double> gamma_b;
    double delta = 1.0;
    RepresentationChoice representation = RepresentationChoice::gaussian;
    std::size_t grid_n = 512;
    double grid_l = 16.0;
    std::uint64_t seed = 42;
    std::optional<std::string> out;
    std::optional<OutputFormat> format;
    std::size_t parties = 2;
    std::size_t dim = 2;
    Layout layout = Layout::alice_holds_pair;
    bool bob_first = false;
};

/// Option names accepted both as --flags and as config-file keys.
const std::vector<std::string> &option_names();

/// Flat JSON object -> option strings. Throws Errc::config for unknown keys
/// or values that are not strings, numbers, or arrays of numbers.
std::map<std::string, std::string> config_options(const nlohmann::json &config);

/// Builds a spec from config-file options overlaid by command-line options.
ExperimentSpec resolve_spec(const std::string &subcommand,
                            const std::map<std::string, std::string> &config,
                            const std::map<std::string, std::string> &flags);

/// Materializes the protocol configuration; appends input warnings.
ProtocolConfig build_protocol_config(const ExperimentSpec &spec, std::vector<std::string> &warnings);
ChainConfig build_chain_config(const ExperimentSpec &spec, std::vector<std::string> &warnings);

/// Exit codes: 0 success, 2 configuration error, 3 numerical precondition.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Executes `spec`, writing results to `out` and diagnostics to `err`.
int run_experiment(const ExperimentSpec &spec, std::ostream &out, std::ostream &err);

}  // namespace weakclone
