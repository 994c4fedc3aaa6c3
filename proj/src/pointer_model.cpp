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

#include "weakclone/pointer_model.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "weakclone/error.hpp"

namespace weakclone {

namespace {

// The FFTW planner is not re-entrant.
std::mutex &planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

PointerGrid::PointerGrid(std::size_t n, double half_width) : n_(n), half_width_(half_width) {
    if (n < 16 || (n & (n - 1)) != 0) {
        throw Error(Errc::shape, "pointer grid size must be a power of two >= 16");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw Error(Errc::shape, "pointer grid half width must be positive");
    }
}

double PointerGrid::bandwidth() const { return std::numbers::pi / spacing(); }

double PointerGrid::momentum(std::size_t m) const {
    const double dp = 2.0 * std::numbers::pi / (static_cast<double>(n_) * spacing());
    const auto signed_m = m < n_ / 2 ? static_cast<double>(m)
                                     : static_cast<double>(m) - static_cast<double>(n_);
    return signed_m * dp;
}

GridPointerState::GridPointerState(PointerGrid grid, std::vector<Complex> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) {
        throw Error(Errc::shape, "pointer sample count does not match its grid");
    }
}

double GridPointerState::weight() const {
    double s = 0.0;
    for (const Complex &z : samples_) {
        s += std::norm(z);
    }
    return s * grid_.spacing();
}

GridPointerState gaussian_pointer(const PointerGrid &grid, double delta) {
    if (!(delta > 0.0)) {
        throw Error(Errc::shape, "pointer width must be positive");
    }
    if (grid.half_width() < 8.0 * delta) {
        throw Error(Errc::grid_too_small, "grid must extend at least 8 widths on each side");
    }
    const double amp = std::pow(2.0 * std::numbers::pi * delta * delta, -0.25);
    std::vector<Complex> samples(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double q = grid.position(k);
        samples[k] = amp * std::exp(-q * q / (4.0 * delta * delta));
    }
    return GridPointerState(grid, std::move(samples));
}

GridPointerState apply_position_phase(const GridPointerState &ps, double c) {
    if (c == 0.0) {
        return ps;
    }
    const Moments m = momentum_moments(ps);
    const double support = std::abs(m.mean - c) + 8.0 * std::sqrt(m.variance);
    if (support > ps.grid().bandwidth()) {
        throw Error(Errc::bandwidth, "phase pushes the momentum support past pi/h");
    }
    std::vector<Complex> samples(ps.samples().begin(), ps.samples().end());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        samples[k] *= std::polar(1.0, -c * ps.grid().position(k));
    }
    return GridPointerState(ps.grid(), std::move(samples));
}

double boundary_leakage(std::span<const Complex> line) {
    double peak = 0.0;
    for (const Complex &z : line) {
        peak = std::max(peak, std::abs(z));
    }
    if (peak == 0.0) {
        return 0.0;
    }
    return std::max(std::abs(line.front()), std::abs(line.back())) / peak;
}

Moments momentum_moments(const GridPointerState &ps) {
    if (boundary_leakage(ps.samples()) > 1e-12) {
        throw Error(Errc::leakage, "pointer samples reach the grid boundary");
    }
    MomentumAccumulator acc(ps.grid());
    acc.add(ps.samples().data(), 1);
    if (acc.weight() == 0.0) {
        throw Error(Errc::zero_weight, "momentum moments of a zero pointer state");
    }
    const double mean = acc.first() / acc.weight();
    const double var = std::max(0.0, acc.second() / acc.weight() - mean * mean);
    return {mean, var};
}

double momentum_space_weight(const GridPointerState &ps) {
    MomentumAccumulator acc(ps.grid());
    acc.add(ps.samples().data(), 1);
    return acc.weight();
}

Moments position_moments(const GridPointerState &ps) {
    double w = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k < ps.grid().size(); ++k) {
        const double q = ps.grid().position(k);
        const double p = std::norm(ps.samples()[k]);
        w += p;
        s1 += p * q;
        s2 += p * q * q;
    }
    if (w == 0.0) {
        throw Error(Errc::zero_weight, "position moments of a zero pointer state");
    }
    const double mean = s1 / w;
    return {mean, std::max(0.0, s2 / w - mean * mean)};
}

// ---------------------------------------------------------------------------

struct MomentumAccumulator::Plan {
    fftw_complex *buffer = nullptr;
    fftw_plan plan = nullptr;
};

MomentumAccumulator::MomentumAccumulator(const PointerGrid &grid)
    : grid_(grid), plan_(std::make_unique<Plan>()) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = static_cast<int>(grid.size());
    plan_->buffer = fftw_alloc_complex(grid.size());
    plan_->plan = fftw_plan_dft_1d(n, plan_->buffer, plan_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
}

MomentumAccumulator::~MomentumAccumulator() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_->plan);
    fftw_free(plan_->buffer);
}

void MomentumAccumulator::add(const Complex *data, std::size_t stride) {
    const std::size_t n = grid_.size();
    fftw_complex *buf = plan_->buffer;
    for (std::size_t k = 0; k < n; ++k) {
        buf[k][0] = data[k * stride].real();
        buf[k][1] = data[k * stride].imag();
    }
    fftw_execute(plan_->plan);
    auto power = [&](std::size_t m) { return buf[m][0] * buf[m][0] + buf[m][1] * buf[m][1]; };
    // |psi~(p_m)|^2 dp = (h / n) |F_m|^2
    const double scale = grid_.spacing() / static_cast<double>(n);
    double z = power(0);
    double f = 0.0;
    double s = 0.0;
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double p = grid_.momentum(m);
        const double plus = power(m);
        const double minus = power(n - m);
        z += plus + minus;
        f += p * (plus - minus);
        s += p * p * (plus + minus);
    }
    const double nyquist = power(n / 2);
    const double p_nyq = grid_.momentum(n / 2);
    z += nyquist;
    f += p_nyq * nyquist;
    s += p_nyq * p_nyq * nyquist;
    zeroth_ += scale * z;
    first_ += scale * f;
    second_ += scale * s;
    double peak = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        peak = std::max(peak, power(m));
    }
    peak_ = std::max(peak_, std::sqrt(peak));
    edge_ = std::max(edge_, std::sqrt(nyquist));
}

double MomentumAccumulator::weight() const { return zeroth_; }
double MomentumAccumulator::first() const { return first_; }
double MomentumAccumulator::second() const { return second_; }
double MomentumAccumulator::spectral_edge_ratio() const { return peak_ == 0.0 ? 0.0 : edge_ / peak_; }

}  // namespace weakclone
