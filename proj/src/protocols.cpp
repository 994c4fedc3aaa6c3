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

#include "weakclone/protocols.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "weakclone/error.hpp"

namespace weakclone {

namespace {

struct Evaluation {
    double probability = 0.0;
    std::vector<PointerMoments> moments;
    std::vector<double> branch_probabilities;
};

void require_qudit(const StateVector &phi) {
    if (phi.rank() != 1) {
        throw Error(Errc::dimension, "input state must be a single qudit");
    }
}

void require_dimension(const HermitianObservable &x, std::size_t n) {
    if (x.dim() != n) {
        throw Error(Errc::dimension, "observable dimension does not match the input state");
    }
}

std::vector<RepresentationChoice> representations_to_run(RepresentationChoice choice) {
    switch (choice) {
        case RepresentationChoice::grid: return {RepresentationChoice::grid};
        case RepresentationChoice::gaussian: return {RepresentationChoice::gaussian};
        case RepresentationChoice::both:
            return {RepresentationChoice::gaussian, RepresentationChoice::grid};
    }
    return {};
}

Representation to_representation(RepresentationChoice c) {
    return c == RepresentationChoice::grid ? Representation::grid : Representation::gaussian_ensemble;
}

Evaluation evaluate_chain(const ChainGeometry &geom, Representation repr, bool reverse_order) {
    JointState js = prepare_joint(geom.setup, repr);
    std::vector<CouplingSpec> order = geom.couplings;
    if (reverse_order) {
        std::reverse(order.begin(), order.end());
    }
    for (const auto &c : order) {
        js = apply_coupling(std::move(js), c);
    }
    Evaluation ev;
    if (geom.postselect_targets.empty()) {
        ev.probability = joint_weight(js);
    } else {
        PostSelected ps = postselect_joint(js, geom.postselect_targets, geom.chi);
        js = std::move(ps.state);
        ev.probability = ps.probability;
    }
    for (std::size_t j = 0; j < geom.couplings.size(); ++j) {
        ev.moments.push_back(pointer_moments(js, j));
    }
    return ev;
}

std::string party_label(std::size_t i) {
    static const char *names[] = {"alice", "bob", "charlie"};
    if (i < 3) {
        return names[i];
    }
    return "party" + std::to_string(i + 1);
}

PointerReport make_pointer_report(std::string party, const PointerMoments &m, double gamma,
                                  double weak_value, double expectation, double ratio) {
    PointerReport r;
    r.party = std::move(party);
    r.shift = m.mean;
    r.variance = m.variance;
    r.gamma = gamma;
    r.weak_value = weak_value;
    r.expectation = expectation;
    r.weakness_ratio = ratio;
    if (gamma != 0.0) {
        r.estimate = -m.mean / gamma;
        r.residual = std::abs(*r.estimate - weak_value);
    }
    return r;
}

void add_weakness_warnings(RunReport &report) {
    for (const auto &p : report.pointers) {
        if (p.weakness_ratio > kWeaknessWarningThreshold) {
            report.warnings.push_back(p.party + ": weakness ratio " + std::to_string(p.weakness_ratio) +
                                      " exceeds " + std::to_string(kWeaknessWarningThreshold));
        }
    }
}

void fill_cross_check(RunReport &report, const Evaluation &primary, const Evaluation &other) {
    CrossCheck cc;
    cc.ps_probability_diff = std::abs(primary.probability - other.probability);
    for (std::size_t j = 0; j < primary.moments.size(); ++j) {
        cc.max_shift_diff =
            std::max(cc.max_shift_diff, std::abs(primary.moments[j].mean - other.moments[j].mean));
    }
    report.cross_check = cc;
}

RunReport run_chain_impl(Scheme scheme, const ProtocolConfig &base,
                         const std::vector<HermitianObservable> &observables) {
    const auto start = std::chrono::steady_clock::now();
    require_qudit(base.phi);
    const std::size_t n = base.phi.dims()[0];
    const std::size_t k = observables.size();
    if (k == 0) {
        throw Error(Errc::config, "a chain needs at least one party");
    }
    for (const auto &x : observables) {
        require_dimension(x, n);
    }
    if (base.representation != RepresentationChoice::gaussian && k > GridJointState::kMaxPointers) {
        throw Error(Errc::representation, "grid representation is limited to two pointers");
    }
    std::vector<double> gammas(k, base.gamma_b);
    std::vector<double> widths(k, base.delta_b);
    gammas[0] = base.gamma_a;
    widths[0] = base.delta_a;
    const ChainGeometry geom = chain_geometry(base.phi, observables, gammas, widths, base.grid);

    std::vector<Evaluation> evals;
    for (RepresentationChoice r : representations_to_run(base.representation)) {
        evals.push_back(evaluate_chain(geom, to_representation(r), base.bob_first));
    }

    RunReport report;
    report.scheme = scheme;
    report.layout = base.layout;
    report.representation = base.representation;
    report.dimension = n;
    report.parties = k;
    report.config = base;
    report.ps_probability = evals.front().probability;

    // Weak values with respect to chi (x) R0/|R0|, the post-selected state at zero strength.
    StateVector post = geom.setup.discrete;
    if (!geom.postselect_targets.empty()) {
        const StateVector r0 =
            project_onto(geom.setup.discrete, geom.postselect_targets, geom.chi).residual;
        post = tensor_product(geom.chi, r0.normalized());
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto &c = geom.couplings[i];
        const double xw = weak_value(geom.setup.discrete, c.observable, c.target, post).real();
        report.pointers.push_back(make_pointer_report(party_label(i), evals.front().moments[i], c.gamma,
                                                      xw, c.observable.expectation(base.phi),
                                                      weakness_ratio(c, widths[i])));
    }
    if (evals.size() == 2) {
        fill_cross_check(report, evals[0], evals[1]);
    }
    add_weakness_warnings(report);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

Evaluation evaluate_sequential(const JointSetup &setup, const CouplingSpec &alice, const CouplingSpec &bob,
                               Representation repr) {
    const double s = 1.0 / std::numbers::sqrt2;
    const std::vector<Complex> bell[4] = {{s, 0, 0, s}, {s, 0, 0, -s}, {0, s, s, 0}, {0, s, -s, 0}};
    const ComplexMatrix corrections[4] = {
        ComplexMatrix::identity(2),
        HermitianObservable::pauli_z().entries(),
        HermitianObservable::pauli_x().entries(),
        HermitianObservable::pauli_z().entries() * HermitianObservable::pauli_x().entries(),
    };
    const std::size_t pair[] = {0, 1};
    const std::size_t teleported[] = {0};

    JointState js = apply_coupling(prepare_joint(setup, repr), alice);
    Evaluation ev;
    std::vector<double> first(2, 0.0);
    std::vector<double> second(2, 0.0);
    for (int outcome = 0; outcome < 4; ++outcome) {
        PostSelected ps = postselect_joint(js, pair, StateVector({2, 2}, bell[outcome]));
        JointState branch = apply_discrete(ps.state, corrections[outcome], teleported);
        branch = apply_coupling(std::move(branch), bob);
        ev.branch_probabilities.push_back(ps.probability);
        ev.probability += ps.probability;
        for (std::size_t j = 0; j < 2; ++j) {
            const PointerMoments m = pointer_moments(branch, j);
            first[j] += m.weight * m.mean;
            second[j] += m.weight * (m.variance + m.mean * m.mean);
        }
    }
    for (std::size_t j = 0; j < 2; ++j) {
        PointerMoments m;
        m.weight = ev.probability;
        m.mean = first[j] / ev.probability;
        m.variance = std::max(0.0, second[j] / ev.probability - m.mean * m.mean);
        ev.moments.push_back(m);
    }
    return ev;
}

}  // namespace

const char *scheme_name(Scheme s) {
    switch (s) {
        case Scheme::weak_cloning: return "weakclone";
        case Scheme::sequential: return "sequential";
        case Scheme::chain: return "chain";
        case Scheme::qudit: return "qudit";
    }
    return "unknown";
}

const char *layout_name(Layout l) {
    return l == Layout::alice_holds_pair ? "alice-holds-pair" : "bob-holds-pair";
}

const char *representation_choice_name(RepresentationChoice r) {
    switch (r) {
        case RepresentationChoice::grid: return "grid";
        case RepresentationChoice::gaussian: return "gaussian";
        case RepresentationChoice::both: return "both";
    }
    return "unknown";
}

ChainGeometry chain_geometry(const StateVector &phi, const std::vector<HermitianObservable> &observables,
                             const std::vector<double> &gammas, const std::vector<double> &widths,
                             const PointerGrid &grid) {
    require_qudit(phi);
    const std::size_t n = phi.dims()[0];
    const std::size_t k = observables.size();
    if (gammas.size() != k || widths.size() != k) {
        throw Error(Errc::shape, "one strength and one width per party");
    }
    ChainGeometry g{JointSetup{phi, widths, grid}, {}, {}, StateVector()};
    const StateVector pair = max_entangled(n);
    for (std::size_t i = 1; i < k; ++i) {
        g.setup.discrete = tensor_product(g.setup.discrete, pair);
        g.chi = tensor_product(g.chi, pair);
    }
    for (std::size_t i = 0; i < k; ++i) {
        g.couplings.push_back({observables[i], 2 * i, i, gammas[i]});
    }
    for (std::size_t t = 0; t + 1 < 2 * k - 1; ++t) {
        g.postselect_targets.push_back(t);
    }
    return g;
}

RunReport run_weak_cloning(const ProtocolConfig &cfg) {
    require_qudit(cfg.phi);
    if (cfg.phi.dims()[0] != 2) {
        throw Error(Errc::dimension, "weak cloning acts on qubits; use the qudit scheme");
    }
    return run_chain_impl(Scheme::weak_cloning, cfg, {cfg.obs_a, cfg.obs_b});
}

RunReport run_qudit(const ProtocolConfig &cfg) {
    return run_chain_impl(Scheme::qudit, cfg, {cfg.obs_a, cfg.obs_b});
}

RunReport run_chain(const ChainConfig &cfg) {
    return run_chain_impl(Scheme::chain, cfg.base, cfg.observables);
}

RunReport run_teleportation_sequential(const ProtocolConfig &cfg) {
    const auto start = std::chrono::steady_clock::now();
    require_qudit(cfg.phi);
    if (cfg.phi.dims()[0] != 2) {
        throw Error(Errc::dimension, "the teleportation baseline needs a qubit");
    }
    require_dimension(cfg.obs_a, 2);
    require_dimension(cfg.obs_b, 2);
    const JointSetup setup{tensor_product(cfg.phi, bell_phi_plus()), {cfg.delta_a, cfg.delta_b}, cfg.grid};
    const CouplingSpec alice{cfg.obs_a, 0, 0, cfg.gamma_a};
    const CouplingSpec bob{cfg.obs_b, 0, 1, cfg.gamma_b};

    std::vector<Evaluation> evals;
    for (RepresentationChoice r : representations_to_run(cfg.representation)) {
        evals.push_back(evaluate_sequential(setup, alice, bob, to_representation(r)));
    }
    RunReport report;
    report.scheme = Scheme::sequential;
    report.layout = cfg.layout;
    report.representation = cfg.representation;
    report.dimension = 2;
    report.parties = 2;
    report.config = cfg;
    report.ps_probability = evals.front().probability;
    report.branch_probabilities = evals.front().branch_probabilities;
    const double ea = cfg.obs_a.expectation(cfg.phi);
    const double eb = cfg.obs_b.expectation(cfg.phi);
    report.pointers.push_back(make_pointer_report("alice", evals.front().moments[0], cfg.gamma_a, ea, ea,
                                                  weakness_ratio(alice, cfg.delta_a)));
    report.pointers.push_back(make_pointer_report("bob", evals.front().moments[1], cfg.gamma_b, eb, eb,
                                                  weakness_ratio(bob, cfg.delta_b)));
    if (evals.size() == 2) {
        fill_cross_check(report, evals[0], evals[1]);
    }
    add_weakness_warnings(report);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

StateVector random_state(std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw Error(Errc::dimension, "random state needs dimension >= 2");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Complex> amps(n);
    for (auto &a : amps) {
        const double re = normal(rng);
        const double im = normal(rng);
        a = Complex(re, im);
    }
    return StateVector({n}, std::move(amps)).normalized();
}

HermitianObservable random_observable(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(r, c) = Complex(re, im);
        }
    }
    ComplexMatrix h = Complex(0.5) * (g + g.adjoint());
    for (std::size_t r = 0; r < n; ++r) {
        h(r, r) = h(r, r).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            h(c, r) = std::conj(h(r, c));
        }
    }
    return HermitianObservable(std::move(h));
}

namespace {

bool same_pointer(const PointerReport &a, const PointerReport &b) {
    return a.party == b.party && a.shift == b.shift && a.variance == b.variance &&
           a.estimate == b.estimate && a.weak_value == b.weak_value && a.expectation == b.expectation &&
           a.residual == b.residual && a.gamma == b.gamma && a.weakness_ratio == b.weakness_ratio;
}

}  // namespace

bool same_numbers(const RunReport &a, const RunReport &b) {
    if (a.scheme != b.scheme || a.representation != b.representation || a.dimension != b.dimension ||
        a.parties != b.parties || a.ps_probability != b.ps_probability ||
        a.branch_probabilities != b.branch_probabilities || a.pointers.size() != b.pointers.size() ||
        a.cross_check.has_value() != b.cross_check.has_value()) {
        return false;
    }
    for (std::size_t i = 0; i < a.pointers.size(); ++i) {
        if (!same_pointer(a.pointers[i], b.pointers[i])) {
            return false;
        }
    }
    if (a.cross_check && (a.cross_check->ps_probability_diff != b.cross_check->ps_probability_diff ||
                          a.cross_check->max_shift_diff != b.cross_check->max_shift_diff)) {
        return false;
    }
    return true;
}

}  // namespace weakclone
