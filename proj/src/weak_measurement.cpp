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

#include "weakclone/weak_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "weakclone/detail/target_split.hpp"
#include "weakclone/error.hpp"

namespace weakclone {

namespace {

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    return strides;
}

std::size_t product_of(std::span<const std::size_t> dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        p *= d;
    }
    return p;
}

void check_discrete_targets(std::span<const std::size_t> targets, std::size_t rank) {
    for (std::size_t t : targets) {
        if (t >= rank) {
            throw Error(Errc::index_out_of_range, "target is not a discrete subsystem");
        }
    }
}

void check_coupling_indices(const CouplingSpec &spec, std::span<const std::size_t> discrete_dims,
                            std::size_t pointers) {
    if (spec.target >= discrete_dims.size()) {
        throw Error(Errc::index_out_of_range, "coupling target is not a discrete subsystem");
    }
    if (spec.pointer >= pointers) {
        throw Error(Errc::index_out_of_range, "coupling pointer index out of range");
    }
    if (spec.observable.dim() != discrete_dims[spec.target]) {
        throw Error(Errc::shape, "observable dimension does not match its target subsystem");
    }
    if (!std::isfinite(spec.gamma)) {
        throw Error(Errc::shape, "coupling strength must be finite");
    }
}

double pow_int(double base, std::size_t exp) {
    double r = 1.0;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

}  // namespace

const char *representation_name(Representation r) {
    return r == Representation::grid ? "grid" : "gaussian";
}

double weakness_ratio(const CouplingSpec &spec, double width) {
    return std::abs(spec.gamma) * spectral_radius(spec.observable) * 2.0 * width;
}

std::vector<SpectralProjector> spectral_projectors(const HermitianObservable &x) {
    const EigenSystem eig = eigendecomposition(x);
    const std::size_t n = x.dim();
    std::vector<SpectralProjector> out;
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && eig.values[end] - eig.values[end - 1] < 1e-12) {
            ++end;
        }
        ComplexMatrix p(n, n);
        double value = 0.0;
        for (std::size_t c = start; c < end; ++c) {
            value += eig.values[c];
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t s = 0; s < n; ++s) {
                    p(r, s) += eig.vectors(r, c) * std::conj(eig.vectors(s, c));
                }
            }
        }
        out.push_back({value / static_cast<double>(end - start), std::move(p)});
        start = end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// GridJointState

GridJointState::GridJointState(StateVector tensor, std::size_t discrete_rank, PointerGrid grid,
                               std::vector<double> widths, std::vector<double> momentum_extent)
    : tensor_(std::move(tensor)),
      discrete_rank_(discrete_rank),
      grid_(grid),
      widths_(std::move(widths)),
      momentum_extent_(std::move(momentum_extent)) {
    if (widths_.size() > kMaxPointers) {
        throw Error(Errc::representation, "grid representation holds at most two pointers");
    }
    if (tensor_.rank() != discrete_rank_ + widths_.size()) {
        throw Error(Errc::shape, "joint tensor rank does not match its layout");
    }
    for (std::size_t j = 0; j < widths_.size(); ++j) {
        if (tensor_.dims()[discrete_rank_ + j] != grid_.size()) {
            throw Error(Errc::shape, "pointer axis does not match the grid size");
        }
    }
}

GridJointState GridJointState::prepare(const JointSetup &setup, std::size_t budget) {
    if (setup.widths.size() > kMaxPointers) {
        throw Error(Errc::representation, "grid representation holds at most two pointers");
    }
    StateVector tensor = setup.discrete;
    std::vector<double> extent;
    for (double width : setup.widths) {
        const GridPointerState g = gaussian_pointer(setup.grid, width);
        const StateVector factor({setup.grid.size()},
                                 std::vector<Complex>(g.samples().begin(), g.samples().end()));
        tensor = tensor_product(tensor, factor, budget);
        // 8 momentum standard deviations of the initial Gaussian.
        extent.push_back(8.0 / (2.0 * width));
        if (extent.back() > setup.grid.bandwidth()) {
            throw Error(Errc::bandwidth, "pointer momentum spread exceeds the grid bandwidth");
        }
    }
    return GridJointState(std::move(tensor), setup.discrete.rank(), setup.grid, setup.widths,
                          std::move(extent));
}

std::vector<std::size_t> GridJointState::discrete_dims() const {
    return {tensor_.dims().begin(), tensor_.dims().begin() + static_cast<std::ptrdiff_t>(discrete_rank_)};
}

double GridJointState::weight() const {
    return tensor_.squared_norm() * pow_int(grid_.spacing(), pointer_count());
}

std::vector<double> GridJointState::couple_in_place(std::span<const std::size_t> dims,
                                                    std::vector<Complex> &amps,
                                                    const CouplingSpec &spec) const {
    check_coupling_indices(spec, dims.first(discrete_rank_), pointer_count());
    std::vector<double> extent = momentum_extent_;
    if (spec.gamma == 0.0) {
        return extent;
    }
    extent[spec.pointer] += std::abs(spec.gamma) * spectral_radius(spec.observable);
    if (extent[spec.pointer] > grid_.bandwidth()) {
        throw Error(Errc::bandwidth, "coupling pushes the pointer momentum past pi/h");
    }

    const auto projectors = spectral_projectors(spec.observable);
    const std::size_t d = spec.observable.dim();
    const std::size_t n = grid_.size();
    // U_k = sum_c exp(-i gamma a_c q_k) P_c, one d x d block per grid point.
    std::vector<Complex> blocks(n * d * d);
    for (std::size_t k = 0; k < n; ++k) {
        const double q = grid_.position(k);
        for (const auto &proj : projectors) {
            const Complex phase = std::polar(1.0, -spec.gamma * proj.eigenvalue * q);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < d; ++c) {
                    blocks[(k * d + r) * d + c] += phase * proj.projector(r, c);
                }
            }
        }
    }

    // Split on the discrete target only; the pointer digit is read off each
    // base offset so the rest axes stream contiguously.
    const std::size_t targets[] = {spec.target};
    const detail::TargetSplit split(dims, targets);
    const auto &offsets = split.target_offsets();
    std::size_t pointer_stride = 1;
    for (std::size_t a = discrete_rank_ + spec.pointer + 1; a < dims.size(); ++a) {
        pointer_stride *= dims[a];
    }
    Complex *data = amps.data();
    std::vector<Complex> buf(d);
    split.for_each_run([&](std::size_t base, std::size_t, std::size_t run) {
        // Within a run the pointer digit is either constant or the run index.
        const bool pointer_inner = pointer_stride == 1;
        const std::size_t k0 = (base / pointer_stride) % n;
        for (std::size_t j = 0; j < run; ++j) {
            const std::size_t at = base + j;
            const Complex *u = &blocks[(pointer_inner ? j : k0) * d * d];
            for (std::size_t i = 0; i < d; ++i) {
                buf[i] = data[at + offsets[i]];
            }
            for (std::size_t r = 0; r < d; ++r) {
                Complex s = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    s += u[r * d + c] * buf[c];
                }
                data[at + offsets[r]] = s;
            }
        }
    });
    return extent;
}

GridJointState GridJointState::apply_coupling(const CouplingSpec &spec) const & {
    std::vector<Complex> amps(tensor_.amps().begin(), tensor_.amps().end());
    std::vector<double> extent = couple_in_place(tensor_.dims(), amps, spec);
    return GridJointState(StateVector(tensor_.dims(), std::move(amps), SIZE_MAX), discrete_rank_,
                          grid_, widths_, std::move(extent));
}

GridJointState GridJointState::apply_coupling(const CouplingSpec &spec) && {
    std::vector<double> extent;
    std::vector<std::size_t> dims = tensor_.dims();
    std::vector<Complex> amps = std::move(tensor_).release();
    try {
        extent = couple_in_place(dims, amps, spec);
    } catch (...) {
        // Restore on validation failure so the moved-from state stays usable.
        tensor_ = StateVector(dims, std::move(amps), SIZE_MAX);
        throw;
    }
    return GridJointState(StateVector(std::move(dims), std::move(amps), SIZE_MAX), discrete_rank_,
                          grid_, widths_, std::move(extent));
}

GridJointState GridJointState::apply_discrete(const ComplexMatrix &op,
                                              std::span<const std::size_t> targets) const {
    check_discrete_targets(targets, discrete_rank_);
    return GridJointState(apply_embedded(tensor_, op, targets), discrete_rank_, grid_, widths_,
                          momentum_extent_);
}

std::pair<GridJointState, double> GridJointState::postselect(std::span<const std::size_t> targets,
                                                             const StateVector &chi) const {
    check_discrete_targets(targets, discrete_rank_);
    Projection p = project_onto(tensor_, targets, chi);
    GridJointState out(std::move(p.residual), discrete_rank_ - targets.size(), grid_, widths_,
                       momentum_extent_);
    const double prob = out.weight();
    return {std::move(out), prob};
}

PointerMoments GridJointState::momentum_moments(std::size_t pointer) const {
    if (pointer >= pointer_count()) {
        throw Error(Errc::index_out_of_range, "pointer index out of range");
    }
    const std::size_t axis[] = {discrete_rank_ + pointer};
    const detail::TargetSplit split(tensor_.dims(), axis);
    const std::size_t n = grid_.size();
    const std::size_t stride = split.target_offsets()[1];
    double peak = 0.0;
    for (const Complex &z : tensor_.amps()) {
        peak = std::max(peak, std::norm(z));
    }
    MomentumAccumulator acc(grid_);
    double edge = 0.0;
    const Complex *data = tensor_.amps().data();
    split.for_each_base([&](std::size_t base, std::size_t) {
        edge = std::max({edge, std::norm(data[base]), std::norm(data[base + (n - 1) * stride])});
        acc.add(data + base, stride);
    });
    if (peak > 0.0 && edge > 1e-24 * peak) {  // squared magnitudes
        throw Error(Errc::leakage, "pointer amplitude reaches the grid boundary");
    }
    const double other_measure = pow_int(grid_.spacing(), pointer_count() - 1);
    PointerMoments m;
    m.weight = acc.weight() * other_measure;
    if (!(acc.weight() > 0.0)) {
        throw Error(Errc::zero_weight, "momentum moments of a zero state");
    }
    m.mean = acc.first() / acc.weight();
    m.variance = std::max(0.0, acc.second() / acc.weight() - m.mean * m.mean);
    return m;
}

double GridJointState::distance(const GridJointState &other) const {
    if (tensor_.dims() != other.tensor_.dims() || !(grid_ == other.grid_)) {
        throw Error(Errc::shape, "distance between grid states of different layout");
    }
    return weakclone::distance(tensor_, other.tensor_) *
           std::sqrt(pow_int(grid_.spacing(), pointer_count()));
}

// ---------------------------------------------------------------------------
// ShiftedGaussianEnsemble

ShiftedGaussianEnsemble::ShiftedGaussianEnsemble(std::vector<std::size_t> discrete_dims,
                                                 std::vector<double> widths,
                                                 std::vector<EnsembleTerm> terms)
    : discrete_dims_(std::move(discrete_dims)), widths_(std::move(widths)) {
    for (double w : widths_) {
        if (!(w > 0.0)) {
            throw Error(Errc::shape, "pointer width must be positive");
        }
    }
    const std::size_t total = product_of(discrete_dims_);
    for (const auto &t : terms) {
        if (t.discrete_index >= total || t.shifts.size() != widths_.size()) {
            throw Error(Errc::shape, "ensemble term does not match the layout");
        }
    }
    std::sort(terms.begin(), terms.end(), [](const EnsembleTerm &a, const EnsembleTerm &b) {
        if (a.discrete_index != b.discrete_index) {
            return a.discrete_index < b.discrete_index;
        }
        return a.shifts < b.shifts;
    });
    for (auto &t : terms) {
        if (!terms_.empty() && terms_.back().discrete_index == t.discrete_index &&
            terms_.back().shifts == t.shifts) {
            terms_.back().coefficient += t.coefficient;
        } else {
            terms_.push_back(std::move(t));
        }
    }
    std::erase_if(terms_, [](const EnsembleTerm &t) { return t.coefficient == Complex(0.0); });
}

ShiftedGaussianEnsemble ShiftedGaussianEnsemble::prepare(const JointSetup &setup) {
    std::vector<EnsembleTerm> terms;
    for (std::size_t i = 0; i < setup.discrete.size(); ++i) {
        if (setup.discrete[i] != Complex(0.0)) {
            terms.push_back({setup.discrete[i], i, std::vector<double>(setup.widths.size(), 0.0)});
        }
    }
    return ShiftedGaussianEnsemble(setup.discrete.dims(), setup.widths, std::move(terms));
}

double ShiftedGaussianEnsemble::overlap(std::size_t pointer, double c, double c_prime) const {
    const double d = (c - c_prime) * widths_[pointer];
    return std::exp(-0.5 * d * d);
}

double ShiftedGaussianEnsemble::weight() const {
    double w = 0.0;
    std::size_t begin = 0;
    while (begin < terms_.size()) {
        std::size_t end = begin;
        while (end < terms_.size() && terms_[end].discrete_index == terms_[begin].discrete_index) {
            ++end;
        }
        for (std::size_t a = begin; a < end; ++a) {
            for (std::size_t b = begin; b < end; ++b) {
                double o = 1.0;
                for (std::size_t j = 0; j < widths_.size(); ++j) {
                    o *= overlap(j, terms_[a].shifts[j], terms_[b].shifts[j]);
                }
                w += (std::conj(terms_[a].coefficient) * terms_[b].coefficient).real() * o;
            }
        }
        begin = end;
    }
    return w;
}

ShiftedGaussianEnsemble ShiftedGaussianEnsemble::apply_coupling(const CouplingSpec &spec) const {
    check_coupling_indices(spec, discrete_dims_, pointer_count());
    if (spec.gamma == 0.0) {
        return *this;
    }
    const auto projectors = spectral_projectors(spec.observable);
    const std::size_t d = spec.observable.dim();
    const std::size_t stride = strides_of(discrete_dims_)[spec.target];
    std::vector<EnsembleTerm> out;
    out.reserve(terms_.size() * projectors.size() * d);
    for (const auto &t : terms_) {
        const std::size_t digit = (t.discrete_index / stride) % d;
        const std::size_t base = t.discrete_index - digit * stride;
        for (const auto &proj : projectors) {
            std::vector<double> shifts = t.shifts;
            shifts[spec.pointer] += spec.gamma * proj.eigenvalue;
            for (std::size_t r = 0; r < d; ++r) {
                const Complex m = proj.projector(r, digit);
                if (m == Complex(0.0)) {
                    continue;
                }
                out.push_back({t.coefficient * m, base + r * stride, shifts});
            }
        }
    }
    return ShiftedGaussianEnsemble(discrete_dims_, widths_, std::move(out));
}

ShiftedGaussianEnsemble ShiftedGaussianEnsemble::apply_discrete(
    const ComplexMatrix &op, std::span<const std::size_t> targets) const {
    const detail::TargetSplit split(discrete_dims_, targets);
    if (!op.is_square() || op.rows() != split.target_size()) {
        throw Error(Errc::shape, "operator dimension does not match the target subsystems");
    }
    const auto strides = strides_of(discrete_dims_);
    const auto &offsets = split.target_offsets();
    std::vector<EnsembleTerm> out;
    for (const auto &t : terms_) {
        std::size_t sub = 0;
        std::size_t base = t.discrete_index;
        for (std::size_t tgt : targets) {
            const std::size_t digit = (t.discrete_index / strides[tgt]) % discrete_dims_[tgt];
            sub = sub * discrete_dims_[tgt] + digit;
            base -= digit * strides[tgt];
        }
        for (std::size_t r = 0; r < op.rows(); ++r) {
            const Complex m = op(r, sub);
            if (m != Complex(0.0)) {
                out.push_back({m * t.coefficient, base + offsets[r], t.shifts});
            }
        }
    }
    return ShiftedGaussianEnsemble(discrete_dims_, widths_, std::move(out));
}

std::pair<ShiftedGaussianEnsemble, double> ShiftedGaussianEnsemble::postselect(
    std::span<const std::size_t> targets, const StateVector &chi) const {
    const detail::TargetSplit split(discrete_dims_, targets);
    std::vector<std::size_t> target_dims;
    for (std::size_t t : targets) {
        target_dims.push_back(discrete_dims_[t]);
    }
    if (chi.dims() != target_dims) {
        throw Error(Errc::shape, "projection state does not match the target subsystems");
    }
    const auto strides = strides_of(discrete_dims_);
    const auto &rest = split.rest_subsystems();
    std::vector<EnsembleTerm> out;
    for (const auto &t : terms_) {
        std::size_t sub = 0;
        for (std::size_t tgt : targets) {
            sub = sub * discrete_dims_[tgt] + (t.discrete_index / strides[tgt]) % discrete_dims_[tgt];
        }
        std::size_t rest_index = 0;
        for (std::size_t r : rest) {
            rest_index = rest_index * discrete_dims_[r] + (t.discrete_index / strides[r]) % discrete_dims_[r];
        }
        const Complex c = std::conj(chi[sub]);
        if (c != Complex(0.0)) {
            out.push_back({c * t.coefficient, rest_index, t.shifts});
        }
    }
    ShiftedGaussianEnsemble ens(split.rest_dims(), widths_, std::move(out));
    const double prob = ens.weight();
    return {std::move(ens), prob};
}

double ShiftedGaussianEnsemble::distance(const ShiftedGaussianEnsemble &other) const {
    if (discrete_dims_ != other.discrete_dims_ || widths_ != other.widths_) {
        throw Error(Errc::shape, "distance between ensembles of different layout");
    }
    std::vector<EnsembleTerm> merged = terms_;
    for (auto t : other.terms_) {
        t.coefficient = -t.coefficient;
        merged.push_back(std::move(t));
    }
    const ShiftedGaussianEnsemble diff(discrete_dims_, widths_, std::move(merged));
    return std::sqrt(std::max(0.0, diff.weight()));
}

PointerMoments analytic_moments(const ShiftedGaussianEnsemble &ens, std::size_t pointer) {
    if (pointer >= ens.pointer_count()) {
        throw Error(Errc::index_out_of_range, "pointer index out of range");
    }
    const auto &terms = ens.terms();
    const double width = ens.widths()[pointer];
    const double zero_point = 1.0 / (4.0 * width * width);
    double w = 0.0;
    double f = 0.0;
    double s = 0.0;
    std::size_t begin = 0;
    while (begin < terms.size()) {
        std::size_t end = begin;
        while (end < terms.size() && terms[end].discrete_index == terms[begin].discrete_index) {
            ++end;
        }
        for (std::size_t a = begin; a < end; ++a) {
            for (std::size_t b = begin; b < end; ++b) {
                double others = 1.0;
                for (std::size_t j = 0; j < ens.pointer_count(); ++j) {
                    if (j != pointer) {
                        others *= ens.overlap(j, terms[a].shifts[j], terms[b].shifts[j]);
                    }
                }
                const double c = terms[a].shifts[pointer];
                const double cp = terms[b].shifts[pointer];
                const double base =
                    (std::conj(terms[a].coefficient) * terms[b].coefficient).real() * others *
                    ens.overlap(pointer, c, cp);
                w += base;
                f += base * (-0.5 * (c + cp));
                s += base * (c * cp + 0.25 * (c - cp) * (c - cp) + zero_point);
            }
        }
        begin = end;
    }
    if (w < 1e-14) {
        throw Error(Errc::zero_weight, "ensemble weight below 1e-14");
    }
    PointerMoments m;
    m.weight = w;
    m.mean = f / w;
    m.variance = std::max(0.0, s / w - m.mean * m.mean);
    return m;
}

namespace {

std::vector<double> distinct_shifts(const ShiftedGaussianEnsemble &ens, std::size_t pointer) {
    std::vector<double> s;
    for (const auto &t : ens.terms()) {
        s.push_back(t.shifts[pointer]);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

std::size_t position_in(const std::vector<double> &sorted, double v) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

ComplexMatrix psd_sqrt(const ComplexMatrix &m) {
    const EigenSystem eig = hermitian_eigen(m);
    const std::size_t n = m.rows();
    ComplexMatrix out(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        const double root = std::sqrt(std::max(0.0, eig.values[c]));
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t s = 0; s < n; ++s) {
                out(r, s) += root * eig.vectors(r, c) * std::conj(eig.vectors(s, c));
            }
        }
    }
    return out;
}

}  // namespace

double pointer_product_deviation(const ShiftedGaussianEnsemble &ens) {
    if (ens.pointer_count() != 2) {
        throw Error(Errc::pointer_count, "product deviation needs exactly two pointers");
    }
    const double w = ens.weight();
    if (w < 1e-14) {
        throw Error(Errc::zero_weight, "ensemble weight below 1e-14");
    }
    const auto sa = distinct_shifts(ens, 0);
    const auto sb = distinct_shifts(ens, 1);
    const std::size_t na = sa.size();
    const std::size_t nb = sb.size();

    // Coefficient matrices in the (non-orthogonal) shifted-Gaussian bases.
    ComplexMatrix joint(na * nb, na * nb);
    ComplexMatrix rho_a(na, na);
    ComplexMatrix rho_b(nb, nb);
    const auto &terms = ens.terms();
    for (const auto &t : terms) {
        for (const auto &u : terms) {
            if (t.discrete_index != u.discrete_index) {
                continue;
            }
            const Complex c = t.coefficient * std::conj(u.coefficient) / w;
            const std::size_t ia = position_in(sa, t.shifts[0]);
            const std::size_t ja = position_in(sa, u.shifts[0]);
            const std::size_t ib = position_in(sb, t.shifts[1]);
            const std::size_t jb = position_in(sb, u.shifts[1]);
            joint(ia * nb + ib, ja * nb + jb) += c;
            rho_a(ia, ja) += c * ens.overlap(1, u.shifts[1], t.shifts[1]);
            rho_b(ib, jb) += c * ens.overlap(0, u.shifts[0], t.shifts[0]);
        }
    }
    const ComplexMatrix diff = joint - kron(rho_a, rho_b);

    ComplexMatrix gram_a(na, na);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            gram_a(i, j) = ens.overlap(0, sa[i], sa[j]);
        }
    }
    ComplexMatrix gram_b(nb, nb);
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            gram_b(i, j) = ens.overlap(1, sb[i], sb[j]);
        }
    }
    const ComplexMatrix root = kron(psd_sqrt(gram_a), psd_sqrt(gram_b));
    ComplexMatrix y = root * diff * root;
    y = Complex(0.5) * (y + y.adjoint());
    const EigenSystem eig = hermitian_eigen(y);
    double trace_norm = 0.0;
    for (double v : eig.values) {
        trace_norm += std::abs(v);
    }
    return std::clamp(0.5 * trace_norm, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

JointState prepare_joint(const JointSetup &setup, Representation repr, std::size_t budget) {
    if (repr == Representation::grid) {
        return GridJointState::prepare(setup, budget);
    }
    return ShiftedGaussianEnsemble::prepare(setup);
}

Representation representation_of(const JointState &js) {
    return std::holds_alternative<GridJointState>(js) ? Representation::grid
                                                      : Representation::gaussian_ensemble;
}

JointState apply_coupling(const JointState &js, const CouplingSpec &spec) {
    return std::visit([&](const auto &s) -> JointState { return s.apply_coupling(spec); }, js);
}

JointState apply_coupling(JointState &&js, const CouplingSpec &spec) {
    if (auto *grid = std::get_if<GridJointState>(&js)) {
        return std::move(*grid).apply_coupling(spec);
    }
    return std::get<ShiftedGaussianEnsemble>(js).apply_coupling(spec);
}

JointState apply_discrete(const JointState &js, const ComplexMatrix &op,
                          std::span<const std::size_t> targets) {
    return std::visit([&](const auto &s) -> JointState { return s.apply_discrete(op, targets); }, js);
}

PostSelected postselect_joint(const JointState &js, std::span<const std::size_t> targets,
                              const StateVector &chi) {
    return std::visit(
        [&](const auto &s) -> PostSelected {
            auto [state, prob] = s.postselect(targets, chi);
            return {JointState(std::move(state)), prob};
        },
        js);
}

PointerMoments pointer_moments(const JointState &js, std::size_t pointer) {
    if (const auto *grid = std::get_if<GridJointState>(&js)) {
        return grid->momentum_moments(pointer);
    }
    return analytic_moments(std::get<ShiftedGaussianEnsemble>(js), pointer);
}

double joint_weight(const JointState &js) {
    return std::visit([](const auto &s) { return s.weight(); }, js);
}

double joint_distance(const JointState &a, const JointState &b) {
    if (a.index() != b.index()) {
        throw Error(Errc::representation, "distance between different representations");
    }
    if (const auto *ga = std::get_if<GridJointState>(&a)) {
        return ga->distance(std::get<GridJointState>(b));
    }
    return std::get<ShiftedGaussianEnsemble>(a).distance(std::get<ShiftedGaussianEnsemble>(b));
}

// ---------------------------------------------------------------------------

Complex weak_value(const StateVector &pre, const HermitianObservable &x, std::size_t target,
                   const StateVector &post) {
    const Complex denom = inner_product(post, pre);
    if (std::abs(denom) <= 1e-12) {
        throw Error(Errc::vanishing_overlap, "pre- and post-selected states are orthogonal");
    }
    const std::size_t t[] = {target};
    return inner_product(post, apply_embedded(pre, x.entries(), t)) / denom;
}

GridJointState first_order_postselected(const JointSetup &setup,
                                        std::span<const CouplingSpec> couplings,
                                        std::span<const std::size_t> targets,
                                        const StateVector &chi) {
    const std::size_t pointers = setup.widths.size();
    if (pointers > GridJointState::kMaxPointers) {
        throw Error(Errc::representation, "grid representation holds at most two pointers");
    }
    std::vector<bool> used(pointers, false);
    for (const auto &c : couplings) {
        check_coupling_indices(c, setup.discrete.dims(), pointers);
        if (used[c.pointer]) {
            throw Error(Errc::shape, "each coupling must drive a distinct pointer");
        }
        used[c.pointer] = true;
    }

    const StateVector r0 = project_onto(setup.discrete, targets, chi).residual;
    const double r0_sq = r0.squared_norm();
    if (r0_sq <= 1e-24) {
        throw Error(Errc::vanishing_overlap, "post-selection annihilates the initial state");
    }
    std::vector<Complex> weak(pointers, 0.0);
    std::vector<double> gamma(pointers, 0.0);
    std::vector<std::vector<Complex>> perp(pointers);
    for (const auto &c : couplings) {
        const std::size_t t[] = {c.target};
        const StateVector rx =
            project_onto(apply_embedded(setup.discrete, c.observable.entries(), t), targets, chi).residual;
        const Complex xw = inner_product(r0, rx) / r0_sq;
        weak[c.pointer] = xw;
        gamma[c.pointer] = c.gamma;
        perp[c.pointer].resize(rx.size());
        for (std::size_t i = 0; i < rx.size(); ++i) {
            perp[c.pointer][i] = rx[i] - xw * r0[i];
        }
    }

    const PointerGrid &grid = setup.grid;
    const std::size_t n = grid.size();
    std::vector<std::vector<double>> gauss(pointers);
    std::vector<std::vector<Complex>> lead(pointers);
    for (std::size_t j = 0; j < pointers; ++j) {
        const GridPointerState g = gaussian_pointer(grid, setup.widths[j]);
        gauss[j].resize(n);
        lead[j].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            gauss[j][k] = g.samples()[k].real();
            lead[j][k] = gauss[j][k] * std::exp(Complex(0.0, -gamma[j] * grid.position(k)) * weak[j]);
        }
    }

    std::vector<std::size_t> dims = r0.dims();
    std::size_t pointer_block = 1;
    for (std::size_t j = 0; j < pointers; ++j) {
        dims.push_back(n);
        pointer_block *= n;
    }
    std::vector<Complex> amps(r0.size() * pointer_block);
    const Complex minus_i(0.0, -1.0);
    std::vector<std::size_t> k(pointers);
    for (std::size_t r = 0; r < r0.size(); ++r) {
        for (std::size_t flat = 0; flat < pointer_block; ++flat) {
            std::size_t rem = flat;
            for (std::size_t j = pointers; j-- > 0;) {
                k[j] = rem % n;
                rem /= n;
            }
            Complex leading = r0[r];
            double plain = 1.0;
            for (std::size_t j = 0; j < pointers; ++j) {
                leading *= lead[j][k[j]];
                plain *= gauss[j][k[j]];
            }
            Complex correction = 0.0;
            for (std::size_t j = 0; j < pointers; ++j) {
                if (!perp[j].empty()) {
                    correction += gamma[j] * perp[j][r] * grid.position(k[j]);
                }
            }
            amps[r * pointer_block + flat] = leading + minus_i * correction * plain;
        }
    }
    std::vector<double> extent(pointers, 0.0);
    return GridJointState(StateVector(std::move(dims), std::move(amps), SIZE_MAX),
                          r0.rank(), grid, setup.widths, std::move(extent));
}

}  // namespace weakclone
