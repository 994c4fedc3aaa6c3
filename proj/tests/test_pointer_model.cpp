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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "weakclone/error.hpp"
#include "weakclone/pointer_model.hpp"

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

// A few displaced, boosted Gaussians with random weights: smooth, well
// inside the grid, and asymmetric in both q and p.
GridPointerState random_wave_packet(const PointerGrid &grid, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> centre(-2.0, 2.0), width(0.5, 1.0), boost(-3.0, 3.0);
    std::normal_distribution<double> g;
    std::vector<Complex> samples(grid.size());
    for (int j = 0; j < 3; ++j) {
        const double q0 = centre(rng), w = width(rng), k0 = boost(rng);
        const Complex amp(g(rng), g(rng));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double q = grid.position(k);
            samples[k] += amp * std::exp(-(q - q0) * (q - q0) / (4 * w * w)) * std::polar(1.0, k0 * q);
        }
    }
    return GridPointerState(grid, std::move(samples));
}

TEST(PointerGridTest, Geometry) {
    const PointerGrid grid;
    EXPECT_EQ(grid.size(), 512u);
    EXPECT_EQ(grid.spacing(), 1.0 / 16.0);
    EXPECT_EQ(grid.position(0), -16.0);
    EXPECT_EQ(grid.position(256), 0.0);
    EXPECT_DOUBLE_EQ(grid.bandwidth(), std::numbers::pi * 16.0);
    EXPECT_DOUBLE_EQ(grid.momentum(1), 2 * std::numbers::pi / 32.0);
    EXPECT_DOUBLE_EQ(grid.momentum(511), -2 * std::numbers::pi / 32.0);
    expect_errc(Errc::shape, [] { PointerGrid(8, 16.0); });
    expect_errc(Errc::shape, [] { PointerGrid(100, 16.0); });
    expect_errc(Errc::shape, [] { PointerGrid(64, 0.0); });
}

TEST(GaussianPointerTest, DefaultMoments) {
    const GridPointerState g = gaussian_pointer(PointerGrid{}, 1.0);
    EXPECT_NEAR(g.weight(), 1.0, 1e-10);
    const Moments q = position_moments(g);
    EXPECT_NEAR(q.mean, 0.0, 1e-12);
    EXPECT_NEAR(q.variance, 1.0, 1e-8);
    const Moments p = momentum_moments(g);
    EXPECT_NEAR(p.mean, 0.0, 1e-10);
    EXPECT_NEAR(p.variance, 0.25, 1e-8);
    EXPECT_LE(boundary_leakage(g.samples()), 1e-12);
}

TEST(GaussianPointerTest, WideGaussian) {
    // L = 8 delta is accepted, but the e^-16 boundary tail is too large for
    // spectral moments; position moments are still fine.
    const GridPointerState g = gaussian_pointer(PointerGrid{}, 2.0);
    const Moments q = position_moments(g);
    EXPECT_NEAR(q.mean, 0.0, 1e-8);
    EXPECT_NEAR(q.variance, 4.0, 1e-8);
    expect_errc(Errc::leakage, [&] { momentum_moments(g); });

    const GridPointerState wide = gaussian_pointer(PointerGrid(1024, 32.0), 2.0);
    EXPECT_NEAR(momentum_moments(wide).variance, 1.0 / 16.0, 1e-8);
}

TEST(GaussianPointerTest, RejectsNarrowGrid) {
    expect_errc(Errc::grid_too_small, [] { gaussian_pointer(PointerGrid{}, 2.5); });
    expect_errc(Errc::shape, [] { gaussian_pointer(PointerGrid{}, 0.0); });
}

TEST(PositionPhaseTest, ShiftsMomentumByMinusC) {
    const GridPointerState g = gaussian_pointer(PointerGrid{}, 1.0);
    EXPECT_EQ(apply_position_phase(g, 0.0).samples()[100], g.samples()[100]);
    const Moments p = momentum_moments(apply_position_phase(g, 0.3));
    EXPECT_NEAR(p.mean, -0.3, 1e-8);
    EXPECT_NEAR(p.variance, 0.25, 1e-8);
}

TEST(PositionPhaseTest, RandomPhasesPreserveNormAndComposeExactly) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> cdist(-5.0, 5.0);
    const GridPointerState g = gaussian_pointer(PointerGrid{}, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = cdist(rng), c2 = cdist(rng);
        const GridPointerState two = apply_position_phase(apply_position_phase(g, c1), c2);
        const GridPointerState one = apply_position_phase(g, c1 + c2);
        EXPECT_NEAR(two.weight(), g.weight(), 1e-12);
        for (std::size_t k = 0; k < g.samples().size(); ++k) {
            ASSERT_LT(std::abs(two.samples()[k] - one.samples()[k]), 1e-14);
        }
        EXPECT_NEAR(position_moments(two).variance, position_moments(g).variance, 1e-12);
    }
}

TEST(PositionPhaseTest, RejectsShiftsPastBandwidth) {
    const GridPointerState g = gaussian_pointer(PointerGrid(64, 16.0), 1.0);
    // pi/h = 2*pi here; 8 sigma_p = 4.
    EXPECT_NO_THROW(apply_position_phase(g, 2.0));
    expect_errc(Errc::bandwidth, [&] { apply_position_phase(g, 2.5); });
}

TEST(MomentumMomentsTest, SymmetricSuperpositionHasZeroMean) {
    const GridPointerState g = gaussian_pointer(PointerGrid{}, 1.0);
    const GridPointerState pg = apply_position_phase(g, 1.0);
    const GridPointerState mg = apply_position_phase(g, -1.0);
    const auto plus = pg.samples();
    const auto minus = mg.samples();
    std::vector<Complex> sum(plus.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = plus[k] + minus[k];
    const Moments m = momentum_moments(GridPointerState(PointerGrid{}, sum));
    EXPECT_NEAR(m.mean, 0.0, 1e-12);
    // <G_c|p^2|G_c'> = (c c' + (c - c')^2 / 4 + 1/4) exp(-(c - c')^2 / 2).
    const double overlap = std::exp(-2.0);
    EXPECT_NEAR(m.variance, (1.0 + 0.25 + (0.25 - 0.0) * overlap) / (1.0 + overlap), 1e-8);
}

TEST(MomentumMomentsTest, RejectsBoundaryLeakage) {
    const PointerGrid grid(64, 16.0);
    expect_errc(Errc::leakage,
                [&] { momentum_moments(GridPointerState(grid, std::vector<Complex>(64, 1.0))); });
    expect_errc(Errc::zero_weight,
                [&] { momentum_moments(GridPointerState(grid, std::vector<Complex>(64, 0.0))); });
}

TEST(PositionMomentsTest, OneStepTranslationShiftsMean) {
    const PointerGrid grid;
    const GridPointerState g = gaussian_pointer(grid, 1.0);
    std::vector<Complex> moved(grid.size());
    for (std::size_t k = 1; k < grid.size(); ++k) moved[k] = g.samples()[k - 1];
    const Moments a = position_moments(g);
    const Moments b = position_moments(GridPointerState(grid, moved));
    EXPECT_NEAR(b.mean - a.mean, grid.spacing(), 1e-12);
    EXPECT_NEAR(b.variance, a.variance, 1e-12);
}

TEST(PointerInvariantsTest, ParsevalAndShiftLawOnRandomPackets) {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> cdist(-4.0, 4.0);
    const PointerGrid grid;
    for (int trial = 0; trial < 100; ++trial) {
        const GridPointerState ps = random_wave_packet(grid, rng);
        EXPECT_NEAR(momentum_space_weight(ps), ps.weight(), 1e-10 * ps.weight());
        const double c = cdist(rng);
        const double before = momentum_moments(ps).mean;
        EXPECT_NEAR(momentum_moments(apply_position_phase(ps, c)).mean, before - c, 1e-8);
    }
}

TEST(PointerInvariantsTest, GridRefinementLeavesMomentsUnchanged) {
    for (double delta : {0.5, 1.0, 1.5}) {
        for (double c : {0.0, 0.7}) {
            const GridPointerState coarse = apply_position_phase(gaussian_pointer(PointerGrid(512, 16.0), delta), c);
            const GridPointerState fine = apply_position_phase(gaussian_pointer(PointerGrid(1024, 16.0), delta), c);
            const Moments pc = momentum_moments(coarse), pf = momentum_moments(fine);
            const Moments qc = position_moments(coarse), qf = position_moments(fine);
            EXPECT_NEAR(pc.mean, pf.mean, 1e-10);
            EXPECT_NEAR(pc.variance, pf.variance, 1e-10);
            EXPECT_NEAR(qc.mean, qf.mean, 1e-10);
            EXPECT_NEAR(qc.variance, qf.variance, 1e-10);
            EXPECT_NEAR(coarse.weight(), fine.weight(), 1e-10);
        }
    }
}

TEST(MomentumAccumulatorTest, StridedLinesAccumulate) {
    const PointerGrid grid;
    const GridPointerState a = apply_position_phase(gaussian_pointer(grid, 1.0), 0.5);
    const GridPointerState b = apply_position_phase(gaussian_pointer(grid, 1.0), -1.5);
    // Interleave two pointer lines with stride 2.
    std::vector<Complex> both(2 * grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        both[2 * k] = a.samples()[k];
        both[2 * k + 1] = Complex(0.0, 2.0) * b.samples()[k];
    }
    MomentumAccumulator acc(grid);
    acc.add(both.data(), 2);
    acc.add(both.data() + 1, 2);
    EXPECT_NEAR(acc.weight(), 5.0, 1e-10);
    EXPECT_NEAR(acc.first() / acc.weight(), (-0.5 + 4.0 * 1.5) / 5.0, 1e-10);
    EXPECT_LT(acc.spectral_edge_ratio(), 1e-12);
}

}  // namespace
}  // namespace weakclone
