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
 * Complex linear algebra over tensor products of finite-dimensional
 * subsystems.
 *
 * Layout: amplitudes are stored row-major over the subsystem list, leftmost
 * subsystem slowest. Every routine that acts on a subset of subsystems
 * gathers the target digits to the front (in the order given), applies the
 * operation, and scatters back, so the same convention holds everywhere.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace weakclone {

using Complex = std::complex<double>;

/// Default cap on the number of stored complex entries in one tensor (2^26).
inline constexpr std::size_t kDefaultAmplitudeBudget = std::size_t{1} << 26;

/// Dense row-major complex matrix.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const Complex> data() const { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    double frobenius_norm() const;
    /// Largest elementwise |M_ij - conj(M_ji)|.
    double hermiticity_defect() const;
    Complex trace() const;

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);
    friend ComplexMatrix operator+(const ComplexMatrix &a, const ComplexMatrix &b);
    friend ComplexMatrix operator-(const ComplexMatrix &a, const ComplexMatrix &b);
    friend ComplexMatrix operator*(Complex s, const ComplexMatrix &a);
    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Kronecker product, leftmost factor slowest.
ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Matrix-vector product.
std::vector<Complex> apply(const ComplexMatrix &m, std::span<const Complex> v);

/**
 * Amplitude tensor over an ordered list of subsystems.
 *
 * An empty dimension list denotes a scalar (one amplitude); this is what a
 * projection onto every subsystem leaves behind.
 */
class StateVector {
  public:
    StateVector();
    StateVector(std::vector<std::size_t> dims, std::vector<Complex> amps,
                std::size_t budget = kDefaultAmplitudeBudget);

    /// Computational basis state |index> over `dims`.
    static StateVector basis(std::vector<std::size_t> dims, std::size_t index);

    const std::vector<std::size_t> &dims() const { return dims_; }
    std::span<const Complex> amps() const { return amps_; }
    std::size_t size() const { return amps_.size(); }
    std::size_t rank() const { return dims_.size(); }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }

    double squared_norm() const;
    double norm() const;
    bool is_normalized(double tol = 1e-10) const;
    StateVector normalized() const;
    StateVector scaled(Complex s) const;

    /// Moves the amplitude storage out, leaving a scalar zero-rank state.
    std::vector<Complex> release() &&;

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    std::vector<std::size_t> dims_;
    std::vector<Complex> amps_;
};

StateVector tensor_product(const StateVector &a, const StateVector &b,
                           std::size_t budget = kDefaultAmplitudeBudget);

/// (|00> + |11>)/sqrt(2).
StateVector bell_phi_plus();

/// sum_j |j>|j> / sqrt(n).
StateVector max_entangled(std::size_t n);

/// <a|b>, conjugate-linear in `a`.
Complex inner_product(const StateVector &a, const StateVector &b);

/// Euclidean distance ||a - b|| for states of identical shape.
double distance(const StateVector &a, const StateVector &b);

/// Applies `op` to the listed subsystems (in the listed order) and the
/// identity elsewhere.
StateVector apply_embedded(const StateVector &state, const ComplexMatrix &op,
                           std::span<const std::size_t> targets);

struct Projection {
    StateVector residual;  // unnormalized, over the non-target subsystems
    double probability = 0.0;
};

/// Partial contraction <chi|_targets |state>.
Projection project_onto(const StateVector &state, std::span<const std::size_t> targets,
                        const StateVector &chi);

class DensityOperator {
  public:
    DensityOperator() = default;
    explicit DensityOperator(ComplexMatrix entries);

    std::size_t dim() const { return entries_.rows(); }
    const ComplexMatrix &entries() const { return entries_; }
    double trace() const;
    double purity() const;

  private:
    ComplexMatrix entries_;
};

/// Reduced density operator on `keep` (in the listed order); its trace is
/// the squared norm of `state`.
DensityOperator partial_trace(const StateVector &state, std::span<const std::size_t> keep);

class HermitianObservable {
  public:
    HermitianObservable() = default;
    /// Throws Errc::non_hermitian if any |M_ij - conj(M_ji)| exceeds 1e-12.
    explicit HermitianObservable(ComplexMatrix entries);

    static HermitianObservable pauli_x();
    static HermitianObservable pauli_y();
    static HermitianObservable pauli_z();

    std::size_t dim() const { return entries_.rows(); }
    const ComplexMatrix &entries() const { return entries_; }

    /// <psi|X|psi> for a single-subsystem state of matching dimension.
    double expectation(const StateVector &psi) const;

  private:
    ComplexMatrix entries_;
};

struct EigenSystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // orthonormal columns
};

/**
 * Spectral decomposition of a Hermitian matrix.
 *
 * 2x2 is closed form (a single exact Jacobi rotation). Larger matrices use
 * cyclic complex Jacobi sweeps until the off-diagonal Frobenius norm drops
 * below 1e-14 of the total, with at most 100 sweeps. Eigenpairs are sorted
 * by ascending eigenvalue and each eigenvector's first non-negligible
 * component is made real positive.
 */
EigenSystem hermitian_eigen(const ComplexMatrix &m);

EigenSystem eigendecomposition(const HermitianObservable &h);

double spectral_radius(const HermitianObservable &h);

}  // namespace weakclone
