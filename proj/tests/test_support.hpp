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


// Shared helpers for the unit tests. Everything here is deliberately naive
// so it can serve as an independent oracle for the library routines.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "weakclone/tensor_core.hpp"

namespace weakclone::testing {

inline std::vector<Complex> random_amps(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(n);
    for (auto &z : v) {
        z = Complex(g(rng), g(rng));
    }
    return v;
}

inline StateVector random_unit(std::vector<std::size_t> dims, std::mt19937_64 &rng) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return StateVector(std::move(dims), random_amps(n, rng)).normalized();
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64 &rng) {
    ComplexMatrix g(n, n, random_amps(n * n, rng));
    ComplexMatrix h = g + g.adjoint();
    return Complex(0.5) * h;
}

// Unitary from Gram-Schmidt on random columns.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64 &rng) {
    ComplexMatrix m(n, n, random_amps(n * n, rng));
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            Complex dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += std::conj(m(r, p)) * m(r, c);
            for (std::size_t r = 0; r < n; ++r) m(r, c) -= dot * m(r, p);
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m(r, c));
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < n; ++r) m(r, c) /= nrm;
    }
    return m;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

}  // namespace weakclone::testing
