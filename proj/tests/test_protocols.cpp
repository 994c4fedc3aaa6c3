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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "weakclone/error.hpp"
#include "weakclone/protocols.hpp"

namespace weakclone {
namespace {

template <typename Fn>
void expect_errc(Errc code, Fn &&fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << errc_name(code);
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

ProtocolConfig random_config(std::uint64_t seed, double gamma) {
    ProtocolConfig cfg;
    cfg.phi = random_state(2, seed);
    cfg.obs_a = random_observable(2, seed + 1);
    cfg.obs_b = random_observable(2, seed + 2);
    cfg.gamma_a = cfg.gamma_b = gamma;
    return cfg;
}

// Tr(rho' B) where rho' is phi after Alice's pointer is traced out: the
// coherence between A-eigenspaces a, a' decays by exp(-gamma^2 (a - a')^2 delta^2 / 2).
double dephased_expectation(const ProtocolConfig &cfg) {
    const EigenSystem es = eigendecomposition(cfg.obs_a);
    const std::size_t n = es.values.size();
    std::vector<Complex> coeff(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < n; ++r) coeff[i] += std::conj(es.vectors(r, i)) * cfg.phi[r];
    }
    Complex total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = cfg.gamma_a * (es.values[i] - es.values[j]) * cfg.delta_a;
            Complex bij = 0.0;  // <v_j|B|v_i>
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) {
                    bij += std::conj(es.vectors(r, j)) * cfg.obs_b.entries()(r, c) * es.vectors(c, i);
                }
            }
            total += coeff[i] * std::conj(coeff[j]) * std::exp(-0.5 * d * d) * bij;
        }
    }
    return total.real();
}

TEST(WeakCloningTest, EigenstateRecoversBothValues) {
    ProtocolConfig cfg;
    cfg.representation = RepresentationChoice::both;
    const RunReport r = run_weak_cloning(cfg);
    EXPECT_NEAR(r.ps_probability, 0.25, 1e-6);
    ASSERT_EQ(r.pointers.size(), 2u);
    EXPECT_NEAR(*r.pointers[0].estimate, 1.0, 1e-4);
    EXPECT_NEAR(*r.pointers[1].estimate, 1.0, 1e-4);
    ASSERT_TRUE(r.cross_check.has_value());
    EXPECT_LE(r.cross_check->ps_probability_diff, 1e-8);
    EXPECT_LE(r.cross_check->max_shift_diff, 1e-8);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(WeakCloningTest, ZeroStrength) {
    ProtocolConfig cfg = random_config(3, 0.0);
    const RunReport r = run_weak_cloning(cfg);
    EXPECT_NEAR(r.ps_probability, 0.25, 1e-12);
    for (const auto &p : r.pointers) {
        EXPECT_NEAR(p.shift, 0.0, 1e-12);
        EXPECT_FALSE(p.estimate.has_value());
        EXPECT_FALSE(p.residual.has_value());
    }
}

TEST(WeakCloningTest, PlusStateWithSzAndSx) {
    ProtocolConfig cfg;
    const double s = 1.0 / std::sqrt(2.0);
    cfg.phi = StateVector({2}, {s, s});
    cfg.obs_b = HermitianObservable::pauli_x();
    cfg.representation = RepresentationChoice::both;
    const RunReport r = run_weak_cloning(cfg);
    EXPECT_NEAR(*r.pointers[0].estimate, 0.0, 1e-4);
    EXPECT_NEAR(*r.pointers[1].estimate, 1.0, 1e-4);
    EXPECT_LE(*r.pointers[1].estimate, 1.0);
}

TEST(WeakCloningTest, ReportsWeakValuesAndWeaknessWarnings) {
    ProtocolConfig cfg = random_config(5, 0.2);
    const RunReport r = run_weak_cloning(cfg);
    for (const auto &p : r.pointers) {
        EXPECT_NEAR(p.weak_value, p.expectation, 1e-12);
        EXPECT_NEAR(*p.residual, std::abs(*p.estimate - p.weak_value), 1e-15);
    }
    EXPECT_EQ(r.warnings.size(), 2u);
    cfg.phi = random_state(3, 1);
    expect_errc(Errc::dimension, [&] { run_weak_cloning(cfg); });
}

TEST(WeakCloningTest, EstimatesMatchDephasedClosedForm) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ProtocolConfig cfg = random_config(100 + seed, 0.05);
        cfg.gamma_b = 1e-3;
        const RunReport r = run_weak_cloning(cfg);
        // Alice's estimate is exact; Bob sees phi dephased by Alice's pointer.
        EXPECT_NEAR(*r.pointers[0].estimate, cfg.obs_a.expectation(cfg.phi), 1e-10);
        EXPECT_NEAR(*r.pointers[1].estimate, dephased_expectation(cfg), 1e-9);
    }
}

TEST(WeakCloningTest, ResidualBoundIsStateIndependent) {
    // |Tr(rho' B) - Tr(rho B)| <= (gamma delta spread(A))^2 / 2 * ||B||.
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (double gamma : {1e-2, 1e-3}) {
            const ProtocolConfig cfg = random_config(1000 + seed, gamma);
            const RunReport r = run_weak_cloning(cfg);
            const EigenSystem ea = eigendecomposition(cfg.obs_a);
            const double spread = ea.values.back() - ea.values.front();
            const double bound = 0.5 * std::pow(gamma * spread, 2) * spectral_radius(cfg.obs_b);
            EXPECT_LE(*r.pointers[1].residual, bound + 1e-9) << "seed " << seed;
            EXPECT_LE(*r.pointers[0].residual, 1e-10);
        }
    }
}

TEST(WeakCloningTest, LayoutAndOrderDoNotChangeNumbers) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ProtocolConfig cfg = random_config(200 + seed, 1e-2);
        const RunReport base = run_weak_cloning(cfg);
        cfg.layout = Layout::bob_holds_pair;
        const RunReport moved = run_weak_cloning(cfg);
        EXPECT_TRUE(same_numbers(base, moved));
        EXPECT_EQ(moved.layout, Layout::bob_holds_pair);
        cfg.bob_first = true;
        const RunReport swapped = run_weak_cloning(cfg);
        EXPECT_NEAR(swapped.ps_probability, base.ps_probability, 1e-12);
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(swapped.pointers[i].shift, base.pointers[i].shift, 1e-12);
            EXPECT_NEAR(swapped.pointers[i].variance, base.pointers[i].variance, 1e-12);
        }
    }
}

TEST(SequentialTest, BranchesAreCompleteAndUniform) {
    const RunReport r = run_teleportation_sequential(random_config(7, 1e-3));
    ASSERT_EQ(r.branch_probabilities.size(), 4u);
    double total = 0.0;
    for (double p : r.branch_probabilities) {
        EXPECT_NEAR(p, 0.25, 1e-12);
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SequentialTest, UnperturbedTeleportationMatchesPlainMeasurement) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ProtocolConfig cfg = random_config(300 + seed, 1e-3);
        cfg.gamma_a = 0.0;
        const RunReport seq = run_teleportation_sequential(cfg);
        // A one-party chain is a plain weak measurement of B on phi.
        ChainConfig plain{cfg, {cfg.obs_b}};
        plain.base.gamma_a = cfg.gamma_b;
        const RunReport direct = run_chain(plain);
        EXPECT_NEAR(*seq.pointers[1].estimate, *direct.pointers[0].estimate, 1e-9);
    }
}

TEST(SequentialTest, AgreesWithWeakCloning) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProtocolConfig cfg = random_config(400 + seed, 1e-3);
        const RunReport wc = run_weak_cloning(cfg);
        const RunReport seq = run_teleportation_sequential(cfg);
        EXPECT_NEAR(*wc.pointers[1].estimate, *seq.pointers[1].estimate, 1e-5);
        EXPECT_NEAR(*seq.pointers[0].estimate, cfg.obs_a.expectation(cfg.phi), 1e-10);
    }
}

TEST(SequentialTest, GridMatchesEnsemble) {
    ProtocolConfig cfg = random_config(9, 1e-3);
    cfg.representation = RepresentationChoice::both;
    const RunReport r = run_teleportation_sequential(cfg);
    ASSERT_TRUE(r.cross_check.has_value());
    EXPECT_LE(r.cross_check->max_shift_diff, 1e-8);
    cfg.phi = random_state(3, 1);
    expect_errc(Errc::dimension, [&] { run_teleportation_sequential(cfg); });
}

TEST(ChainTest, ProbabilitiesAndEstimates) {
    for (std::size_t k = 1; k <= 4; ++k) {
        ChainConfig cfg;
        cfg.base = random_config(500 + k, 1e-3);
        for (std::size_t i = 0; i < k; ++i) cfg.observables.push_back(random_observable(2, 600 + i));
        const RunReport r = run_chain(cfg);
        EXPECT_EQ(r.parties, k);
        EXPECT_NEAR(r.ps_probability, std::pow(0.25, static_cast<double>(k - 1)), 1e-6);
        ASSERT_EQ(r.pointers.size(), k);
        for (const auto &p : r.pointers) {
            EXPECT_NEAR(*p.estimate, p.expectation, 1e-4) << p.party;
        }
        cfg.base.gamma_a = cfg.base.gamma_b = 0.0;
        EXPECT_NEAR(run_chain(cfg).ps_probability, std::pow(0.25, static_cast<double>(k - 1)), 1e-12);
    }
}

TEST(ChainTest, TwoPartiesReproduceWeakCloning) {
    const ProtocolConfig base = random_config(11, 1e-3);
    const RunReport chain = run_chain({base, {base.obs_a, base.obs_b}});
    const RunReport wc = run_weak_cloning(base);
    EXPECT_EQ(chain.ps_probability, wc.ps_probability);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(chain.pointers[i].shift, wc.pointers[i].shift);
}

TEST(ChainTest, RejectsGridBeyondTwoPointersAndEmptyChains) {
    ChainConfig cfg;
    cfg.base.representation = RepresentationChoice::grid;
    cfg.observables.assign(3, HermitianObservable::pauli_z());
    expect_errc(Errc::representation, [&] { run_chain(cfg); });
    cfg.observables.clear();
    cfg.base.representation = RepresentationChoice::gaussian;
    expect_errc(Errc::config, [&] { run_chain(cfg); });
}

TEST(QuditTest, ProbabilityIsInverseSquareDimension) {
    for (std::size_t n = 2; n <= 5; ++n) {
        ProtocolConfig cfg;
        cfg.phi = random_state(n, 700 + n);
        cfg.obs_a = random_observable(n, 800 + n);
        cfg.obs_b = random_observable(n, 900 + n);
        cfg.gamma_a = cfg.gamma_b = 0.0;
        EXPECT_NEAR(run_qudit(cfg).ps_probability, 1.0 / static_cast<double>(n * n), 1e-12);
        cfg.gamma_a = cfg.gamma_b = 1e-3;
        const RunReport r = run_qudit(cfg);
        for (const auto &p : r.pointers) EXPECT_LE(*p.residual, 1e-4);
    }
}

TEST(QuditTest, QubitCaseMatchesWeakCloning) {
    const ProtocolConfig cfg = random_config(13, 1e-3);
    const RunReport q = run_qudit(cfg);
    const RunReport wc = run_weak_cloning(cfg);
    EXPECT_EQ(q.ps_probability, wc.ps_probability);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(q.pointers[i].shift, wc.pointers[i].shift);
        EXPECT_EQ(q.pointers[i].estimate, wc.pointers[i].estimate);
    }
    ProtocolConfig bad = cfg;
    bad.phi = random_state(3, 2);
    expect_errc(Errc::dimension, [&] { run_qudit(bad); });
}

TEST(RandomStateTest, NormalizedAndDeterministic) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const StateVector a = random_state(4, seed);
        EXPECT_NEAR(a.norm(), 1.0, 1e-12);
        EXPECT_EQ(a, random_state(4, seed));
    }
    EXPECT_NE(random_state(2, 1), random_state(2, 2));
    EXPECT_EQ(random_observable(3, 5).entries(), random_observable(3, 5).entries());
    EXPECT_LT(random_observable(3, 5).entries().hermiticity_defect(), 1e-15);
}

TEST(RandomStateTest, HaarMeanOfSz) {
    double total = 0.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
        total += HermitianObservable::pauli_z().expectation(random_state(2, static_cast<std::uint64_t>(i)));
    }
    EXPECT_NEAR(total / samples, 0.0, 0.02);
}

}  // namespace
}  // namespace weakclone
