// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace hrs
{
    using cd = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;

    namespace linalg
    {
        // Left singular vectors for the k largest singular values (k <= rows).
        CMatrix dominant_left_singular_vectors(const CMatrix &A, Eigen::Index k);

        // Orthonormal basis of the column space, rank decided relative to the largest singular value.
        CMatrix column_space_basis(const CMatrix &A, double rel_tol = 1e-10);

        // Orthonormal basis of the orthogonal complement of span(Q); Q must have orthonormal columns.
        CMatrix orthogonal_complement(const CMatrix &Q, Eigen::Index dim);

        double hermitian_error(const CMatrix &A); // max |A - A^H|
    }

    // splitmix64 finalizer, used to derive independent stream seeds from a master seed.
    constexpr std::uint64_t mix_seed(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0)
    {
        return mix_seed(mix_seed(master ^ mix_seed(stream)) + index);
    }
}
