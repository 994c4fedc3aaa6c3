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
 * Von Neumann couplings exp(-i gamma X (x) q) between discrete subsystems and
 * continuous pointers, in two independent representations:
 *
 *  - GridJointState: the full amplitude tensor over the discrete subsystems
 *    and every pointer's position grid. Discretization-limited, at most two
 *    pointers.
 *  - ShiftedGaussianEnsemble: a finite superposition of discrete basis states
 *    times products of momentum-shifted Gaussians e^{-icq} G(q). Exact to all
 *    orders, so it scales to chains with many pointers.
 *
 * Inner products in the ensemble use
 *   <G_c|G_c'>     = exp(-(c - c')^2 D^2 / 2)
 *   <G_c|p|G_c'>   = -((c + c') / 2) <G_c|G_c'>
 *   <G_c|p^2|G_c'> = (c c' + (c - c')^2 / 4 + 1 / (4 D^2)) <G_c|G_c'>
 * for a Gaussian of position variance D^2.
 */
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "weakclone/pointer_model.hpp"
#include "weakclone/tensor_core.hpp"

namespace weakclone {

enum class Representation { grid, gaussian_ensemble };

const char *representation_name(Representation r);

/// Discrete initial state plus one Gaussian pointer (of the given width) per
/// entry of `widths`, all pointers initially unshifted.
struct JointSetup {
    StateVector discrete;
    std::vector<double> widths;
    PointerGrid grid{};
};

struct CouplingSpec {
    HermitianObservable observable;
    std::size_t target = 0;   // discrete subsystem
    std::size_t pointer = 0;  // pointer register
    double gamma = 0.0;
};

/// gamma * spectral_radius(X) * 2 * width; the regime is weak when this is
/// well below 1 (a warning is raised above 0.1).
double weakness_ratio(const CouplingSpec &spec, double width);

inline constexpr double kWeaknessWarningThreshold = 0.1;

/// Normalized momentum mean/variance of one pointer, plus the total weight
/// (squared norm) of the state they were computed from.
struct PointerMoments {
    double mean = 0.0;
    double variance = 0.0;
    double weight = 0.0;
};

/// Spectral projectors of an observable with eigenvalues closer than 1e-12
/// merged into one cluster.
struct SpectralProjector {
    double eigenvalue;
    ComplexMatrix projector;
};
std::vector<SpectralProjector> spectral_projectors(const HermitianObservable &x);

// ---------------------------------------------------------------------------

class GridJointState {
  public:
    static constexpr std::size_t kMaxPointers = 2;

    /// Throws Errc::representation for more than two pointers and
    /// Errc::capacity if the joint tensor exceeds `budget`.
    static GridJointState prepare(const JointSetup &setup,
                                  std::size_t budget = kDefaultAmplitudeBudget);

    /// Tensor over discrete dims followed by one grid axis per pointer.
    const StateVector &tensor() const { return tensor_; }
    std::size_t discrete_rank() const { return discrete_rank_; }
    std::vector<std::size_t> discrete_dims() const;
    std::size_t pointer_count() const { return widths_.size(); }
    const PointerGrid &grid() const { return grid_; }
    const std::vector<double> &widths() const { return widths_; }

    /// sum |psi|^2 h^pointers
    double weight() const;

    GridJointState apply_coupling(const CouplingSpec &spec) const &;
    /// Reuses this state's storage.
    GridJointState apply_coupling(const CouplingSpec &spec) &&;
    GridJointState apply_discrete(const ComplexMatrix &op, std::span<const std::size_t> targets) const;
    std::pair<GridJointState, double> postselect(std::span<const std::size_t> targets,
                                                 const StateVector &chi) const;
    PointerMoments momentum_moments(std::size_t pointer) const;
    /// L2 distance including the grid measure.
    double distance(const GridJointState &other) const;

    /// Builds a state directly from a tensor laid out as discrete ++ pointer axes.
    GridJointState(StateVector tensor, std::size_t discrete_rank, PointerGrid grid,
                   std::vector<double> widths, std::vector<double> momentum_extent);

  private:
    // Validates `spec`, returns the updated momentum extents, and applies the
    // coupling in place to `amps`, laid out with shape `dims`.
    std::vector<double> couple_in_place(std::span<const std::size_t> dims, std::vector<Complex> &amps,
                                        const CouplingSpec &spec) const;

    StateVector tensor_;
    std::size_t discrete_rank_;
    PointerGrid grid_;
    std::vector<double> widths_;
    // Upper bound on |p| support per pointer, checked against pi / h.
    std::vector<double> momentum_extent_;
};

struct EnsembleTerm {
    Complex coefficient;
    std::size_t discrete_index = 0;
    std::vector<double> shifts;  // one momentum shift per pointer

    friend bool operator==(const EnsembleTerm &, const EnsembleTerm &) = default;
};

class ShiftedGaussianEnsemble {
  public:
    static ShiftedGaussianEnsemble prepare(const JointSetup &setup);

    /// Canonicalizes: terms sorted by (discrete index, shifts) with
    /// identical keys merged.
    ShiftedGaussianEnsemble(std::vector<std::size_t> discrete_dims, std::vector<double> widths,
                            std::vector<EnsembleTerm> terms);

    const std::vector<std::size_t> &discrete_dims() const { return discrete_dims_; }
    std::size_t discrete_rank() const { return discrete_dims_.size(); }
    std::size_t pointer_count() const { return widths_.size(); }
    const std::vector<double> &widths() const { return widths_; }
    const std::vector<EnsembleTerm> &terms() const { return terms_; }

    double weight() const;
    /// Gaussian overlap <G_c|G_c'> for pointer j.
    double overlap(std::size_t pointer, double c, double c_prime) const;

    ShiftedGaussianEnsemble apply_coupling(const CouplingSpec &spec) const;
    ShiftedGaussianEnsemble apply_discrete(const ComplexMatrix &op,
                                           std::span<const std::size_t> targets) const;
    std::pair<ShiftedGaussianEnsemble, double> postselect(std::span<const std::size_t> targets,
                                                          const StateVector &chi) const;
    double distance(const ShiftedGaussianEnsemble &other) const;

  private:
    std::vector<std::size_t> discrete_dims_;
    std::vector<double> widths_;
    std::vector<EnsembleTerm> terms_;
};

/// Closed-form momentum moments of one pointer. Throws Errc::zero_weight when
/// the ensemble weight is below 1e-14.
PointerMoments analytic_moments(const ShiftedGaussianEnsemble &ens, std::size_t pointer);

/**
 * Trace distance between the normalized two-pointer reduced state and the
 * product of its marginals, evaluated in the span of the ensemble's shifted
 * Gaussians via Gram matrices. Throws Errc::pointer_count unless the ensemble
 * has exactly two pointers.
 */
double pointer_product_deviation(const ShiftedGaussianEnsemble &ens);

// ---------------------------------------------------------------------------
// Representation-agnostic surface.

using JointState = std::variant<GridJointState, ShiftedGaussianEnsemble>;

JointState prepare_joint(const JointSetup &setup, Representation repr,
                         std::size_t budget = kDefaultAmplitudeBudget);
Representation representation_of(const JointState &js);
JointState apply_coupling(const JointState &js, const CouplingSpec &spec);
JointState apply_coupling(JointState &&js, const CouplingSpec &spec);
JointState apply_discrete(const JointState &js, const ComplexMatrix &op,
                          std::span<const std::size_t> targets);

struct PostSelected {
    JointState state;  // unnormalized
    double probability;
};
PostSelected postselect_joint(const JointState &js, std::span<const std::size_t> targets,
                              const StateVector &chi);

PointerMoments pointer_moments(const JointState &js, std::size_t pointer);
double joint_weight(const JointState &js);
/// Throws Errc::representation when the two states use different representations.
double joint_distance(const JointState &a, const JointState &b);

// ---------------------------------------------------------------------------

/// <post| X_target |pre> / <post|pre>. Throws Errc::vanishing_overlap when
/// |<post|pre>| <= 1e-12.
Complex weak_value(const StateVector &pre, const HermitianObservable &x, std::size_t target,
                   const StateVector &post);

/**
 * First-order expansion of the post-selected joint state on the grid:
 *
 *   R0 (x) prod_j e^{-i g_j X_w,j q_j} G_j  -  i sum_j g_j r_j^perp (x) q_j G_j (x) prod_{k!=j} G_k
 *
 * where R0 = <chi|Phi> is the zero-strength residual, X_w the weak value
 * with respect to chi (x) R0/|R0|, and r_j^perp the part of <chi|X_j|Phi>
 * orthogonal to R0. Each coupling must drive a distinct pointer.
 */
GridJointState first_order_postselected(const JointSetup &setup,
                                        std::span<const CouplingSpec> couplings,
                                        std::span<const std::size_t> targets,
                                        const StateVector &chi);

}  // namespace weakclone
