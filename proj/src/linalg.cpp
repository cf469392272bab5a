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

#include "hrs/linalg.hpp"

#include <stdexcept>

namespace hrs
{
    namespace linalg
    {
        CMatrix dominant_left_singular_vectors(const CMatrix &A, Eigen::Index k)
        {
            if (k < 0 || k > A.rows())
                throw std::invalid_argument("Requested more singular vectors than rows.");
            Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullU);
            return svd.matrixU().leftCols(k);
        }

        CMatrix column_space_basis(const CMatrix &A, double rel_tol)
        {
            if (A.cols() == 0)
                return CMatrix(A.rows(), 0);
            Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU);
            const RVector &s = svd.singularValues();
            Eigen::Index rank = 0;
            const double cut = s.size() ? s(0) * rel_tol : 0.0;
            while (rank < s.size() && s(rank) > cut && s(rank) > 0.0)
                ++rank;
            return svd.matrixU().leftCols(rank);
        }

        CMatrix orthogonal_complement(const CMatrix &Q, Eigen::Index dim)
        {
            if (Q.cols() == 0)
                return CMatrix::Identity(dim, dim);
            Eigen::JacobiSVD<CMatrix> svd(Q, Eigen::ComputeFullU);
            return svd.matrixU().rightCols(dim - Q.cols());
        }

        double hermitian_error(const CMatrix &A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }
    }
}
