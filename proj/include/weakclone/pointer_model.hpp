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
 * Continuous pointer registers sampled on a uniform periodic grid.
 *
 * Fourier convention: psi~(p) = (2 pi)^(-1/2) \int e^{-ipq} psi(q) dq, so a
 * position phase e^{-icq} moves <p> by -c. Momentum moments are computed
 * spectrally from the DFT of the samples.
 */
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "weakclone/tensor_core.hpp"

namespace weakclone {

class PointerGrid {
  public:
    /// Throws Errc::shape unless n is a power of two >= 16 and half_width > 0.
    PointerGrid(std::size_t n = 512, double half_width = 16.0);

    std::size_t size() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    double position(std::size_t k) const { return -half_width_ + static_cast<double>(k) * spacing(); }
    /// pi / h, the largest representable |p|.
    double bandwidth() const;
    /// Angular frequency of DFT bin m (negative frequencies for m >= n/2).
    double momentum(std::size_t m) const;

    friend bool operator==(const PointerGrid &, const PointerGrid &) = default;

  private:
    std::size_t n_;
    double half_width_;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

class GridPointerState {
  public:
    GridPointerState(PointerGrid grid, std::vector<Complex> samples);

    const PointerGrid &grid() const { return grid_; }
    std::span<const Complex> samples() const { return samples_; }
    /// sum |psi_k|^2 h
    double weight() const;

  private:
    PointerGrid grid_;
    std::vector<Complex> samples_;
};

/// (2 pi delta^2)^(-1/4) exp(-q^2 / (4 delta^2)) on the grid, so Var(q) = delta^2.
/// Throws Errc::grid_too_small unless the grid extends 8 delta each side.
GridPointerState gaussian_pointer(const PointerGrid &grid, double delta);

/// Pointwise product with exp(-i c q_k). Throws Errc::bandwidth when the
/// shifted momentum support |<p> - c| + 8 sigma_p would pass pi / h.
GridPointerState apply_position_phase(const GridPointerState &ps, double c);

/// Mean and variance of |psi~(p)|^2. Throws Errc::leakage when a boundary
/// sample exceeds 1e-12 of the peak magnitude.
Moments momentum_moments(const GridPointerState &ps);

Moments position_moments(const GridPointerState &ps);

/// Momentum-space norm sum_m |psi~_m|^2 dp, equal to the position-space norm.
double momentum_space_weight(const GridPointerState &ps);

/// Boundary-to-peak magnitude ratio along one axis of a sampled register.
double boundary_leakage(std::span<const Complex> line);

/**
 * Accumulates spectral moments of many length-n lines that share a grid.
 *
 * Each call to add() transforms one line (e.g. one pointer axis slice of a
 * joint tensor) and adds its unnormalized zeroth, first, and second momentum
 * moments.
 */
class MomentumAccumulator {
  public:
    explicit MomentumAccumulator(const PointerGrid &grid);
    ~MomentumAccumulator();
    MomentumAccumulator(const MomentumAccumulator &) = delete;
    MomentumAccumulator &operator=(const MomentumAccumulator &) = delete;

    /// Adds a line read with the given stride from `data`.
    void add(const Complex *data, std::size_t stride);

    /// sum |psi~|^2 dp over all lines added so far (position-space weight).
    double weight() const;
    /// Unnormalized sum p |psi~|^2 dp.
    double first() const;
    /// Unnormalized sum p^2 |psi~|^2 dp.
    double second() const;
    /// Largest edge-bin to peak-bin magnitude ratio seen in momentum space.
    double spectral_edge_ratio() const;

  private:
    struct Plan;
    PointerGrid grid_;
    std::unique_ptr<Plan> plan_;
    double zeroth_ = 0.0;
    double first_ = 0.0;
    double second_ = 0.0;
    double peak_ = 0.0;
    double edge_ = 0.0;
};

}  // namespace weakclone
