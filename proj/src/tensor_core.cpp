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

#include "weakclone/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "weakclone/detail/target_split.hpp"
#include "weakclone/error.hpp"

namespace weakclone {

namespace {

std::size_t checked_product(std::span<const std::size_t> dims, std::size_t budget) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d != 0 && total > budget / d) {
            throw Error(Errc::capacity, "tensor exceeds the amplitude budget of " +
                                            std::to_string(budget) + " entries");
        }
        total *= d;
    }
    if (total > budget) {
        throw Error(Errc::capacity, "tensor exceeds the amplitude budget of " +
                                        std::to_string(budget) + " entries");
    }
    return total;
}

void require_finite(std::span<const Complex> amps) {
    for (const Complex &z : amps) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(Errc::shape, "non-finite amplitude");
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw Error(Errc::shape, "matrix entry count does not match its shape");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex &z : data_) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
    if (!is_square()) {
        return INFINITY;
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        }
    }
    return worst;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols_ != b.rows_) {
        throw Error(Errc::shape, "matrix product shape mismatch");
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix operator+(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
        throw Error(Errc::shape, "matrix sum shape mismatch");
    }
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) {
        out.data_[i] += b.data_[i];
    }
    return out;
}

ComplexMatrix operator-(const ComplexMatrix &a, const ComplexMatrix &b) {
    return a + Complex(-1.0) * b;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix &a) {
    ComplexMatrix out = a;
    for (Complex &z : out.data_) {
        z *= s;
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

std::vector<Complex> apply(const ComplexMatrix &m, std::span<const Complex> v) {
    if (m.cols() != v.size()) {
        throw Error(Errc::shape, "matrix-vector shape mismatch");
    }
    std::vector<Complex> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            s += m(i, j) * v[j];
        }
        out[i] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector() : amps_(1, Complex(1.0)) {}

StateVector::StateVector(std::vector<std::size_t> dims, std::vector<Complex> amps,
                         std::size_t budget)
    : dims_(std::move(dims)), amps_(std::move(amps)) {
    for (std::size_t d : dims_) {
        if (d < 2) {
            throw Error(Errc::dimension, "subsystem dimension must be at least 2");
        }
    }
    if (amps_.size() != checked_product(dims_, budget)) {
        throw Error(Errc::shape, "amplitude count does not match the product of dimensions");
    }
    require_finite(amps_);
}

StateVector StateVector::basis(std::vector<std::size_t> dims, std::size_t index) {
    std::size_t total = checked_product(dims, kDefaultAmplitudeBudget);
    if (index >= total) {
        throw Error(Errc::index_out_of_range, "basis index out of range");
    }
    std::vector<Complex> amps(total);
    amps[index] = 1.0;
    return StateVector(std::move(dims), std::move(amps));
}

double StateVector::squared_norm() const {
    double s = 0.0;
    for (const Complex &z : amps_) {
        s += std::norm(z);
    }
    return s;
}

double StateVector::norm() const { return std::sqrt(squared_norm()); }

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw Error(Errc::zero_weight, "cannot normalize a zero vector");
    }
    return scaled(1.0 / n);
}

StateVector StateVector::scaled(Complex s) const {
    StateVector out = *this;
    for (Complex &z : out.amps_) {
        z *= s;
    }
    return out;
}

std::vector<Complex> StateVector::release() && {
    std::vector<Complex> out = std::move(amps_);
    dims_.clear();
    amps_.assign(1, Complex(1.0));
    return out;
}

StateVector tensor_product(const StateVector &a, const StateVector &b, std::size_t budget) {
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    checked_product(dims, budget);
    std::vector<Complex> amps;
    amps.reserve(a.size() * b.size());
    for (const Complex &x : a.amps()) {
        for (const Complex &y : b.amps()) {
            amps.push_back(x * y);
        }
    }
    return StateVector(std::move(dims), std::move(amps), budget);
}

StateVector bell_phi_plus() { return max_entangled(2); }

StateVector max_entangled(std::size_t n) {
    if (n < 2) {
        throw Error(Errc::dimension, "maximally entangled state needs dimension >= 2");
    }
    std::vector<Complex> amps(n * n);
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        amps[j * n + j] = a;
    }
    return StateVector({n, n}, std::move(amps));
}

Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.dims() != b.dims()) {
        throw Error(Errc::shape, "inner product of states with different shapes");
    }
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

double distance(const StateVector &a, const StateVector &b) {
    if (a.dims() != b.dims()) {
        throw Error(Errc::shape, "distance between states with different shapes");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::norm(a[i] - b[i]);
    }
    return std::sqrt(s);
}

StateVector apply_embedded(const StateVector &state, const ComplexMatrix &op,
                           std::span<const std::size_t> targets) {
    const detail::TargetSplit split(state.dims(), targets);
    if (!op.is_square() || op.rows() != split.target_size()) {
        throw Error(Errc::shape, "operator dimension does not match the target subsystems");
    }
    const std::size_t d = split.target_size();
    const auto &offsets = split.target_offsets();
    std::vector<Complex> out(state.amps().begin(), state.amps().end());
    std::vector<Complex> local(d);
    split.for_each_base([&](std::size_t base, std::size_t) {
        for (std::size_t k = 0; k < d; ++k) {
            local[k] = state[base + offsets[k]];
        }
        for (std::size_t i = 0; i < d; ++i) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                s += op(i, k) * local[k];
            }
            out[base + offsets[i]] = s;
        }
    });
    return StateVector(state.dims(), std::move(out), SIZE_MAX);
}

Projection project_onto(const StateVector &state, std::span<const std::size_t> targets,
                        const StateVector &chi) {
    const detail::TargetSplit split(state.dims(), targets);
    std::vector<std::size_t> target_dims;
    for (std::size_t t : targets) {
        target_dims.push_back(state.dims()[t]);
    }
    if (chi.dims() != target_dims) {
        throw Error(Errc::shape, "projection state does not match the target subsystems");
    }
    const auto &offsets = split.target_offsets();
    std::vector<Complex> residual(split.rest_size());
    split.for_each_base([&](std::size_t base, std::size_t idx) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            s += std::conj(chi[k]) * state[base + offsets[k]];
        }
        residual[idx] = s;
    });
    Projection p{StateVector(split.rest_dims(), std::move(residual), SIZE_MAX), 0.0};
    p.probability = p.residual.squared_norm();
    return p;
}

// ---------------------------------------------------------------------------
// Densities and observables

DensityOperator::DensityOperator(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (!entries_.is_square()) {
        throw Error(Errc::shape, "density operator must be square");
    }
}

double DensityOperator::trace() const { return entries_.trace().real(); }

double DensityOperator::purity() const {
    const double t = trace();
    double s = 0.0;
    for (const Complex &z : entries_.data()) {
        s += std::norm(z);
    }
    return s / (t * t);
}

DensityOperator partial_trace(const StateVector &state, std::span<const std::size_t> keep) {
    if (keep.empty()) {
        throw Error(Errc::shape, "partial trace needs at least one kept subsystem");
    }
    const detail::TargetSplit split(state.dims(), keep);
    const std::size_t d = split.target_size();
    const auto &offsets = split.target_offsets();
    ComplexMatrix rho(d, d);
    split.for_each_base([&](std::size_t base, std::size_t) {
        for (std::size_t i = 0; i < d; ++i) {
            const Complex a = state[base + offsets[i]];
            if (a == Complex(0.0)) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                rho(i, j) += a * std::conj(state[base + offsets[j]]);
            }
        }
    });
    return DensityOperator(std::move(rho));
}

HermitianObservable::HermitianObservable(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (!entries_.is_square()) {
        throw Error(Errc::shape, "observable must be square");
    }
    if (entries_.rows() < 2) {
        throw Error(Errc::dimension, "observable dimension must be at least 2");
    }
    if (entries_.hermiticity_defect() > 1e-12) {
        throw Error(Errc::non_hermitian, "observable is not Hermitian within 1e-12");
    }
}

HermitianObservable HermitianObservable::pauli_x() {
    return HermitianObservable(ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}));
}

HermitianObservable HermitianObservable::pauli_y() {
    return HermitianObservable(
        ComplexMatrix(2, 2, {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}));
}

HermitianObservable HermitianObservable::pauli_z() {
    return HermitianObservable(ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}));
}

double HermitianObservable::expectation(const StateVector &psi) const {
    if (psi.rank() != 1 || psi.dims()[0] != dim()) {
        throw Error(Errc::shape, "expectation needs a single subsystem of matching dimension");
    }
    const auto xpsi = apply(entries_, psi.amps());
    Complex s = 0.0;
    for (std::size_t i = 0; i < xpsi.size(); ++i) {
        s += std::conj(psi[i]) * xpsi[i];
    }
    return s.real();
}

// ---------------------------------------------------------------------------
// Eigendecomposition

namespace {

double off_diagonal_norm(const ComplexMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(s);
}

// Zeroes a(p,q) with a unitary rotation a <- J^dag a J, accumulating v <- v J.
void jacobi_rotate(ComplexMatrix &a, ComplexMatrix &v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) {
        return;
    }
    const Complex phase = apq / mag;
    const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
    const Complex jpp = c;
    const Complex jpq = s;
    const Complex jqp = -s * std::conj(phase);
    const Complex jqq = c * std::conj(phase);
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * jpp + akq * jqp;
        a(k, q) = akp * jpq + akq * jqq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
        a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * jpp + vkq * jqp;
        v(k, q) = vkp * jpq + vkq * jqq;
    }
}

}  // namespace

EigenSystem hermitian_eigen(const ComplexMatrix &m) {
    if (!m.is_square()) {
        throw Error(Errc::shape, "eigendecomposition of a non-square matrix");
    }
    const double scale = std::max(1.0, m.frobenius_norm());
    if (m.hermiticity_defect() > 1e-12 * scale) {
        throw Error(Errc::non_hermitian, "eigendecomposition input is not Hermitian");
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = Complex(0.5) * (m + m.adjoint());
    ComplexMatrix v = ComplexMatrix::identity(n);
    if (n == 2) {
        jacobi_rotate(a, v, 0, 1);
    } else if (n > 2) {
        const double total = a.frobenius_norm();
        for (int sweep = 0; sweep < 100; ++sweep) {
            if (off_diagonal_norm(a) <= 1e-14 * total) {
                break;
            }
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    jacobi_rotate(a, v, p, q);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });
    EigenSystem out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.values[c] = a(src, src).real();
        Complex phase = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double mag = std::abs(v(r, src));
            if (mag > 1e-12) {
                phase = std::conj(v(r, src)) / mag;
                break;
            }
        }
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, c) = v(r, src) * phase;
        }
    }
    return out;
}

EigenSystem eigendecomposition(const HermitianObservable &h) { return hermitian_eigen(h.entries()); }

double spectral_radius(const HermitianObservable &h) {
    const auto eig = eigendecomposition(h);
    return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

}  // namespace weakclone
