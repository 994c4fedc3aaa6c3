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

#include "weakclone/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "weakclone/error.hpp"

namespace weakclone {

double fit_convergence_slope(std::span<const std::pair<double, double>> points) {
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    std::size_t m = 0;
    for (const auto &[gamma, err] : points) {
        if (!(gamma > 0.0) || err < 0.0 || !std::isfinite(err)) {
            throw Error(Errc::degenerate_fit, "slope fit needs positive gammas and finite errors");
        }
        if (err < 1e-13) {
            continue;
        }
        const double x = std::log(gamma);
        const double y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) {
        throw Error(Errc::degenerate_fit, "fewer than three points above the 1e-13 floor");
    }
    const double dm = static_cast<double>(m);
    const double denom = dm * sxx - sx * sx;
    if (denom <= 0.0) {
        throw Error(Errc::degenerate_fit, "all gammas coincide");
    }
    return (dm * sxy - sx * sy) / denom;
}

std::vector<SweepRow> run_sweep(const ProtocolConfig &base, Scheme scheme, std::vector<double> gammas) {
    if (gammas.size() < 3) {
        throw Error(Errc::config, "a sweep needs at least three gamma values");
    }
    for (double g : gammas) {
        if (!(g > 0.0)) {
            throw Error(Errc::config, "sweep gammas must be positive");
        }
    }
    std::sort(gammas.begin(), gammas.end(), std::greater<>());
    std::vector<SweepRow> rows;
    for (double g : gammas) {
        ProtocolConfig cfg = base;
        cfg.gamma_a = g;
        cfg.gamma_b = g;
        RunReport r;
        switch (scheme) {
            case Scheme::sequential: r = run_teleportation_sequential(cfg); break;
            case Scheme::qudit: r = run_qudit(cfg); break;
            default: r = run_weak_cloning(cfg); break;
        }
        const auto &a = r.pointers[0];
        const auto &b = r.pointers[1];
        SweepRow row;
        row.gamma = g;
        row.est_a = *a.estimate;
        row.exact_a = a.expectation;
        row.err_a = std::abs(row.est_a - row.exact_a);
        row.est_b = *b.estimate;
        row.exact_b = b.expectation;
        row.err_b = std::abs(row.est_b - row.exact_b);
        row.ps_prob = r.ps_probability;
        row.representation = representation_choice_name(cfg.representation);
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepSlopes sweep_slopes(std::span<const SweepRow> rows) {
    std::vector<std::pair<double, double>> a;
    std::vector<std::pair<double, double>> b;
    for (const auto &r : rows) {
        a.emplace_back(r.gamma, r.err_a);
        b.emplace_back(r.gamma, r.err_b);
    }
    SweepSlopes s;
    try {
        s.slope_a = fit_convergence_slope(a);
    } catch (const Error &) {
    }
    try {
        s.slope_b = fit_convergence_slope(b);
    } catch (const Error &) {
    }
    return s;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string format_slope(const std::optional<double> &s) { return s ? format_double(*s) : "nan"; }

nlohmann::json optional_json(const std::optional<double> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json matrix_json(const ComplexMatrix &m) {
    nlohmann::json out = nlohmann::json::array();
    for (const Complex &z : m.data()) {
        out.push_back(z.real());
        out.push_back(z.imag());
    }
    return out;
}

}  // namespace

std::string sweep_to_csv(std::span<const SweepRow> rows, const SweepSlopes &slopes) {
    std::ostringstream os;
    os << kSweepCsvHeader << '\n';
    for (const auto &r : rows) {
        os << format_double(r.gamma) << ',' << format_double(r.est_a) << ',' << format_double(r.exact_a)
           << ',' << format_double(r.err_a) << ',' << format_double(r.est_b) << ','
           << format_double(r.exact_b) << ',' << format_double(r.err_b) << ','
           << format_double(r.ps_prob) << ',' << r.representation << '\n';
    }
    os << "# slope_a=" << format_slope(slopes.slope_a) << " slope_b=" << format_slope(slopes.slope_b)
       << '\n';
    return os.str();
}

std::string sweep_to_jsonl(std::span<const SweepRow> rows, const SweepSlopes &slopes) {
    std::ostringstream os;
    for (const auto &r : rows) {
        nlohmann::json j = {{"gamma", r.gamma}, {"est_a", r.est_a},   {"exact_a", r.exact_a},
                            {"err_a", r.err_a}, {"est_b", r.est_b},   {"exact_b", r.exact_b},
                            {"err_b", r.err_b}, {"ps_prob", r.ps_prob}, {"representation", r.representation}};
        os << j.dump() << '\n';
    }
    nlohmann::json footer = {{"slope_a", optional_json(slopes.slope_a)},
                             {"slope_b", optional_json(slopes.slope_b)}};
    os << footer.dump() << '\n';
    return os.str();
}

nlohmann::json pointer_to_json(const PointerReport &p) {
    return {{"party", p.party},
            {"gamma", p.gamma},
            {"delta_p", p.shift},
            {"var_p", p.variance},
            {"estimate", optional_json(p.estimate)},
            {"weak_value", p.weak_value},
            {"expectation", p.expectation},
            {"residual", optional_json(p.residual)},
            {"weakness_ratio", p.weakness_ratio}};
}

nlohmann::json report_to_json(const RunReport &r) {
    nlohmann::json j;
    j["scheme"] = scheme_name(r.scheme);
    j["layout"] = layout_name(r.layout);
    j["representation"] = representation_choice_name(r.representation);
    j["dimension"] = r.dimension;
    j["parties"] = r.parties;
    j["ps_probability"] = r.ps_probability;
    j["pointers"] = nlohmann::json::array();
    for (const auto &p : r.pointers) {
        j["pointers"].push_back(pointer_to_json(p));
    }
    if (!r.branch_probabilities.empty()) {
        j["branch_probabilities"] = r.branch_probabilities;
    }
    if (r.cross_check) {
        j["cross_check"] = {{"ps_probability_diff", r.cross_check->ps_probability_diff},
                            {"max_delta_p_diff", r.cross_check->max_shift_diff}};
    }
    j["warnings"] = r.warnings;
    nlohmann::json state = nlohmann::json::array();
    for (const Complex &z : r.config.phi.amps()) {
        state.push_back(z.real());
        state.push_back(z.imag());
    }
    j["config"] = {{"state", state},
                   {"obs_a", matrix_json(r.config.obs_a.entries())},
                   {"obs_b", matrix_json(r.config.obs_b.entries())},
                   {"gamma_a", r.config.gamma_a},
                   {"gamma_b", r.config.gamma_b},
                   {"delta_a", r.config.delta_a},
                   {"delta_b", r.config.delta_b},
                   {"grid_n", r.config.grid.size()},
                   {"grid_l", r.config.grid.half_width()},
                   {"seed", r.config.seed}};
    return j;
}

// ---------------------------------------------------------------------------

std::vector<double> parse_double_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
            throw Error(Errc::config, "empty entry in numeric list '" + text + "'");
        }
        item = item.substr(first, last - first + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            throw Error(Errc::config, "not a number: '" + item + "'");
        }
        if (used != item.size() || !std::isfinite(v)) {
            throw Error(Errc::config, "not a finite number: '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty() || (!text.empty() && text.back() == ',')) {
        throw Error(Errc::config, "malformed numeric list '" + text + "'");
    }
    return out;
}

ParsedState parse_state(const std::string &text) {
    const auto values = parse_double_list(text);
    if (values.size() % 2 != 0 || values.size() < 4) {
        throw Error(Errc::config, "state needs interleaved re,im pairs for at least two amplitudes");
    }
    std::vector<Complex> amps;
    for (std::size_t i = 0; i < values.size(); i += 2) {
        amps.emplace_back(values[i], values[i + 1]);
    }
    const std::size_t n = amps.size();
    StateVector s({n}, std::move(amps));
    if (s.norm() == 0.0) {
        throw Error(Errc::config, "state has zero norm");
    }
    ParsedState out{s, false};
    if (std::abs(s.norm() - 1.0) > 1e-10) {
        out.state = s.normalized();
        out.renormalized = true;
    }
    return out;
}

HermitianObservable parse_observable(const std::string &text) {
    if (text == "sx") return HermitianObservable::pauli_x();
    if (text == "sy") return HermitianObservable::pauli_y();
    if (text == "sz") return HermitianObservable::pauli_z();
    if (text.rfind("h:", 0) != 0) {
        throw Error(Errc::config, "unknown observable '" + text + "' (expected sx, sy, sz, or h:...)");
    }
    const auto values = parse_double_list(text.substr(2));
    const std::size_t count = values.size() / 2;
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
    if (values.size() % 2 != 0 || n * n != count || n < 2) {
        throw Error(Errc::config, "observable entries must form an n x n complex matrix with n >= 2");
    }
    std::vector<Complex> entries;
    for (std::size_t i = 0; i < values.size(); i += 2) {
        entries.emplace_back(values[i], values[i + 1]);
    }
    try {
        return HermitianObservable(ComplexMatrix(n, n, std::move(entries)));
    } catch (const Error &e) {
        throw Error(Errc::config, std::string("observable rejected: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

const std::vector<std::string> &option_names() {
    static const std::vector<std::string> names = {
        "scheme", "state", "obs-a", "obs-b", "obs-list", "gamma", "gamma-a", "gamma-b",
        "delta",  "repr",  "grid-n", "grid-l", "seed",   "out",   "format",  "parties",
        "dim",    "layout", "order",
    };
    return names;
}

std::map<std::string, std::string> config_options(const nlohmann::json &config) {
    if (!config.is_object()) {
        throw Error(Errc::config, "config file must hold a flat JSON object");
    }
    const auto &names = option_names();
    std::map<std::string, std::string> out;
    for (const auto &[key, value] : config.items()) {
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw Error(Errc::config, "unknown config key '" + key + "'");
        }
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_number_integer() && !value.is_number_float()) {
            out[key] = std::to_string(value.get<long long>());
        } else if (value.is_number()) {
            out[key] = format_double(value.get<double>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto &v : value) {
                if (!v.is_number()) {
                    throw Error(Errc::config, "config key '" + key + "' must list numbers");
                }
                joined += (joined.empty() ? "" : ",") + format_double(v.get<double>());
            }
            out[key] = joined;
        } else {
            throw Error(Errc::config, "config key '" + key + "' has an unsupported value type");
        }
    }
    return out;
}

namespace {

double parse_one_double(const std::string &key, const std::string &text) {
    const auto v = parse_double_list(text);
    if (v.size() != 1) {
        throw Error(Errc::config, "--" + key + " takes a single number");
    }
    return v[0];
}

std::uint64_t parse_unsigned(const std::string &key, const std::string &text) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!text.empty() && text[0] == '-') {
            throw std::invalid_argument("negative");
        }
        v = std::stoull(text, &used);
    } catch (const std::exception &) {
        throw Error(Errc::config, "--" + key + " needs a non-negative integer");
    }
    if (used != text.size()) {
        throw Error(Errc::config, "--" + key + " needs a non-negative integer");
    }
    return v;
}

}  // namespace

ExperimentSpec resolve_spec(const std::string &subcommand,
                            const std::map<std::string, std::string> &config,
                            const std::map<std::string, std::string> &flags) {
    if (subcommand != "run" && subcommand != "sweep" && subcommand != "chain" && subcommand != "qudit") {
        throw Error(Errc::config, "unknown subcommand '" + subcommand + "'");
    }
    std::map<std::string, std::string> merged = config;
    for (const auto &[k, v] : flags) {
        merged[k] = v;
    }
    const auto &names = option_names();
    ExperimentSpec spec;
    spec.subcommand = subcommand;
    if (subcommand == "chain") {
        spec.scheme = Scheme::chain;
    } else if (subcommand == "qudit") {
        spec.scheme = Scheme::qudit;
    }
    for (const auto &[key, value] : merged) {
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw Error(Errc::config, "unknown option '" + key + "'");
        }
        if (key == "scheme") {
            if (value == "weakclone") {
                spec.scheme = Scheme::weak_cloning;
            } else if (value == "sequential") {
                spec.scheme = Scheme::sequential;
            } else {
                throw Error(Errc::config, "--scheme must be weakclone or sequential");
            }
            if (subcommand == "chain" || subcommand == "qudit") {
                throw Error(Errc::config, "--scheme applies to run and sweep only");
            }
        } else if (key == "state") {
            spec.state = value;
        } else if (key == "obs-a") {
            spec.obs_a = value;
        } else if (key == "obs-b") {
            spec.obs_b = value;
        } else if (key == "obs-list") {
            spec.obs_list = value;
        } else if (key == "gamma") {
            spec.gammas = parse_double_list(value);
        } else if (key == "gamma-a") {
            spec.gamma_a = parse_one_double(key, value);
        } else if (key == "gamma-b") {
            spec.gamma_b = parse_one_double(key, value);
        } else if (key == "delta") {
            spec.delta = parse_one_double(key, value);
            if (!(spec.delta > 0.0)) {
                throw Error(Errc::config, "--delta must be positive");
            }
        } else if (key == "repr") {
            if (value == "grid") {
                spec.representation = RepresentationChoice::grid;
            } else if (value == "gaussian") {
                spec.representation = RepresentationChoice::gaussian;
            } else if (value == "both") {
                spec.representation = RepresentationChoice::both;
            } else {
                throw Error(Errc::config, "--repr must be grid, gaussian, or both");
            }
        } else if (key == "grid-n") {
            spec.grid_n = parse_unsigned(key, value);
        } else if (key == "grid-l") {
            spec.grid_l = parse_one_double(key, value);
        } else if (key == "seed") {
            spec.seed = parse_unsigned(key, value);
        } else if (key == "out") {
            spec.out = value;
        } else if (key == "format") {
            if (value == "csv") {
                spec.format = OutputFormat::csv;
            } else if (value == "jsonl") {
                spec.format = OutputFormat::jsonl;
            } else {
                throw Error(Errc::config, "--format must be csv or jsonl");
            }
        } else if (key == "parties") {
            spec.parties = parse_unsigned(key, value);
            if (spec.parties < 1) {
                throw Error(Errc::config, "--parties must be at least 1");
            }
        } else if (key == "dim") {
            spec.dim = parse_unsigned(key, value);
            if (spec.dim < 2) {
                throw Error(Errc::config, "--dim must be at least 2");
            }
        } else if (key == "layout") {
            if (value == "alice-holds-pair") {
                spec.layout = Layout::alice_holds_pair;
            } else if (value == "bob-holds-pair") {
                spec.layout = Layout::bob_holds_pair;
            } else {
                throw Error(Errc::config, "--layout must be alice-holds-pair or bob-holds-pair");
            }
        } else if (key == "order") {
            if (value == "alice-first") {
                spec.bob_first = false;
            } else if (value == "bob-first") {
                spec.bob_first = true;
            } else {
                throw Error(Errc::config, "--order must be alice-first or bob-first");
            }
        }
    }
    if (subcommand != "sweep" && spec.gammas.size() != 1) {
        throw Error(Errc::config, "--gamma takes a single value outside sweep");
    }
    return spec;
}

namespace {

std::size_t state_dimension(const ExperimentSpec &spec) {
    return spec.subcommand == "qudit" || spec.subcommand == "chain" ? spec.dim : 2;
}

}  // namespace

ProtocolConfig build_protocol_config(const ExperimentSpec &spec, std::vector<std::string> &warnings) {
    ProtocolConfig cfg;
    const std::size_t n = state_dimension(spec);
    if (spec.state) {
        ParsedState ps = parse_state(*spec.state);
        if (ps.renormalized) {
            warnings.push_back("input state was not normalized; renormalized");
        }
        cfg.phi = ps.state;
        if (spec.subcommand == "qudit" || spec.subcommand == "chain") {
            if (cfg.phi.dims()[0] != spec.dim) {
                throw Error(Errc::config, "--state dimension does not match --dim");
            }
        } else if (cfg.phi.dims()[0] != 2) {
            throw Error(Errc::config, "run and sweep take a qubit --state (use qudit for N > 2)");
        }
    } else {
        cfg.phi = random_state(n, spec.seed);
    }
    const std::size_t dim = cfg.phi.dims()[0];
    cfg.obs_a = spec.obs_a ? parse_observable(*spec.obs_a) : random_observable(dim, spec.seed + 1);
    cfg.obs_b = spec.obs_b ? parse_observable(*spec.obs_b) : random_observable(dim, spec.seed + 2);
    if (cfg.obs_a.dim() != dim || cfg.obs_b.dim() != dim) {
        throw Error(Errc::config, "observable dimension does not match the state dimension");
    }
    const double gamma = spec.gammas.front();
    cfg.gamma_a = spec.gamma_a.value_or(gamma);
    cfg.gamma_b = spec.gamma_b.value_or(gamma);
    cfg.delta_a = spec.delta;
    cfg.delta_b = spec.delta;
    cfg.representation = spec.representation;
    try {
        cfg.grid = PointerGrid(spec.grid_n, spec.grid_l);
    } catch (const Error &e) {
        throw Error(Errc::config, e.what());
    }
    cfg.seed = spec.seed;
    cfg.layout = spec.layout;
    cfg.bob_first = spec.bob_first;
    return cfg;
}

ChainConfig build_chain_config(const ExperimentSpec &spec, std::vector<std::string> &warnings) {
    ChainConfig chain;
    chain.base = build_protocol_config(spec, warnings);
    const std::size_t dim = chain.base.phi.dims()[0];
    if (spec.obs_list) {
        std::stringstream ss(*spec.obs_list);
        std::string item;
        while (std::getline(ss, item, ';')) {
            chain.observables.push_back(parse_observable(item));
        }
        if (chain.observables.size() != spec.parties) {
            throw Error(Errc::config, "--obs-list needs one observable per party");
        }
    } else {
        for (std::size_t i = 0; i < spec.parties; ++i) {
            if (i == 0) {
                chain.observables.push_back(chain.base.obs_a);
            } else if (i == 1) {
                chain.observables.push_back(chain.base.obs_b);
            } else {
                chain.observables.push_back(random_observable(dim, spec.seed + 1 + i));
            }
        }
    }
    for (const auto &x : chain.observables) {
        if (x.dim() != dim) {
            throw Error(Errc::config, "observable dimension does not match the state dimension");
        }
    }
    return chain;
}

int run_experiment(const ExperimentSpec &spec, std::ostream &out, std::ostream &err) {
    std::vector<std::string> warnings;
    std::string output;
    try {
        if (spec.subcommand == "run") {
            const ProtocolConfig cfg = build_protocol_config(spec, warnings);
            const RunReport r = spec.scheme == Scheme::sequential ? run_teleportation_sequential(cfg)
                                                                  : run_weak_cloning(cfg);
            warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
            output = report_to_json(r).dump() + "\n";
        } else if (spec.subcommand == "sweep") {
            if (spec.gammas.size() < 3) {
                throw Error(Errc::config, "a sweep needs at least three gamma values");
            }
            const ProtocolConfig cfg = build_protocol_config(spec, warnings);
            const auto rows = run_sweep(cfg, spec.scheme, spec.gammas);
            const auto slopes = sweep_slopes(rows);
            output = spec.format.value_or(OutputFormat::csv) == OutputFormat::csv
                         ? sweep_to_csv(rows, slopes)
                         : sweep_to_jsonl(rows, slopes);
        } else if (spec.subcommand == "chain") {
            const ChainConfig cfg = build_chain_config(spec, warnings);
            const RunReport r = run_chain(cfg);
            warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
            for (const auto &p : r.pointers) {
                output += pointer_to_json(p).dump() + "\n";
            }
            nlohmann::json summary = report_to_json(r);
            summary.erase("pointers");
            summary["summary"] = true;
            output += summary.dump() + "\n";
        } else if (spec.subcommand == "qudit") {
            const ProtocolConfig cfg = build_protocol_config(spec, warnings);
            const RunReport r = run_qudit(cfg);
            warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
            output = report_to_json(r).dump() + "\n";
            const nlohmann::json summary = {{"summary", true},
                                            {"scheme", scheme_name(r.scheme)},
                                            {"dimension", r.dimension},
                                            {"ps_probability", r.ps_probability}};
            output += summary.dump() + "\n";
        } else {
            throw Error(Errc::config, "unknown subcommand '" + spec.subcommand + "'");
        }
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return is_input_error(e.code()) ? kExitConfig : kExitNumerical;
    }
    for (const auto &w : warnings) {
        err << "warning: " << w << '\n';
    }
    out << output;
    out.flush();
    return kExitOk;
}

}  // namespace weakclone
