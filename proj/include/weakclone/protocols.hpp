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
 * End-to-end protocol drivers.
 *
 * Party i of a chain of k parties weakly measures qudit 2i of
 *
 *   |phi>_0 |psi>_{1,2} |psi>_{3,4} ... |psi>_{2k-3,2k-2}
 *
 * with pointer i, and the parties jointly post-select |psi> on every pair
 * (0,1), (2,3), ..., (2k-4,2k-3). Weak cloning is the k = 2 qubit chain and
 * the qudit scheme is the k = 2 chain over dimension N. The sequential
 * baseline instead teleports the weakly measured state through a full
 * Bell-basis measurement and Pauli correction before the second coupling.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weakclone/weak_measurement.hpp"

namespace weakclone {

enum class Scheme { weak_cloning, sequential, chain, qudit };
enum class Layout { alice_holds_pair, bob_holds_pair };
enum class RepresentationChoice { grid, gaussian, both };

const char *scheme_name(Scheme s);
const char *layout_name(Layout l);
const char *representation_choice_name(RepresentationChoice r);

struct ProtocolConfig {
    StateVector phi = StateVector::basis({2}, 0);
    HermitianObservable obs_a = HermitianObservable::pauli_z();
    HermitianObservable obs_b = HermitianObservable::pauli_z();
    double gamma_a = 1e-3;
    double gamma_b = 1e-3;
    double delta_a = 1.0;
    double delta_b = 1.0;
    RepresentationChoice representation = RepresentationChoice::gaussian;
    PointerGrid grid{};
    std::uint64_t seed = 0;
    Layout layout = Layout::alice_holds_pair;
    // Apply Bob's coupling before Alice's.
    bool bob_first = false;
};

/// Party 0 uses gamma_a/delta_a from `base`; every later party uses
/// gamma_b/delta_b. One observable per party.
struct ChainConfig {
    ProtocolConfig base;
    std::vector<HermitianObservable> observables;
};

struct PointerReport {
    std::string party;
    double shift = 0.0;     // <p> of the normalized post-selected pointer
    double variance = 0.0;  // Var(p)
    std::optional<double> estimate;  // -shift / gamma, absent at gamma = 0
    double weak_value = 0.0;
    double expectation = 0.0;        // <phi|X|phi>
    std::optional<double> residual;  // |estimate - weak_value|
    double gamma = 0.0;
    double weakness_ratio = 0.0;
};

struct CrossCheck {
    double ps_probability_diff = 0.0;
    double max_shift_diff = 0.0;
};

struct RunReport {
    Scheme scheme = Scheme::weak_cloning;
    Layout layout = Layout::alice_holds_pair;
    RepresentationChoice representation = RepresentationChoice::gaussian;
    std::size_t dimension = 2;
    std::size_t parties = 2;
    double ps_probability = 0.0;
    std::vector<PointerReport> pointers;
    std::vector<double> branch_probabilities;  // sequential scheme only
    std::optional<CrossCheck> cross_check;     // representation "both" only
    std::vector<std::string> warnings;
    ProtocolConfig config;
    double wall_time_seconds = 0.0;
};

/// True when every numerical field (everything but wall time and layout)
/// is bitwise identical.
bool same_numbers(const RunReport &a, const RunReport &b);

RunReport run_weak_cloning(const ProtocolConfig &cfg);
RunReport run_teleportation_sequential(const ProtocolConfig &cfg);
RunReport run_chain(const ChainConfig &cfg);
RunReport run_qudit(const ProtocolConfig &cfg);

/// Haar-random pure state: n standard complex Gaussians, normalized.
StateVector random_state(std::size_t n, std::uint64_t seed);

/// (G + G^dag) / 2 for a matrix G of standard complex Gaussians.
HermitianObservable random_observable(std::size_t n, std::uint64_t seed);

/// Joint setup and couplings of a k-party chain, shared by the drivers and
/// by tests that need the raw joint states.
struct ChainGeometry {
    JointSetup setup;
    std::vector<CouplingSpec> couplings;
    std::vector<std::size_t> postselect_targets;
    StateVector chi;  // |psi>^(k-1) on postselect_targets
};
ChainGeometry chain_geometry(const StateVector &phi, const std::vector<HermitianObservable> &observables,
                             const std::vector<double> &gammas, const std::vector<double> &widths,
                             const PointerGrid &grid = PointerGrid{});

}  // namespace weakclone
