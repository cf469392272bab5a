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

#include "hrs/simd/kernels.hpp"

#include <cmath>

namespace hrs::simd
{
    namespace
    {
        double dot_scalar(const double *a, const double *b, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += a[i] * b[i];
            return s;
        }

        void axpy_scalar(double alpha, const double *x, double *y, std::size_t n)
        {
            for (std::size_t i = 0; i < n; ++i)
                y[i] += alpha * x[i];
        }

        std::complex<double> cdot_scalar(const std::complex<double> *a, const std::complex<double> *b, std::size_t n)
        {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double ar = a[i].real(), ai = a[i].imag();
                const double br = b[i].real(), bi = b[i].imag();
                re += ar * br + ai * bi;
                im += ar * bi - ai * br;
            }
            return {re, im};
        }

        void adam_scalar(double *param, const double *grad, double *m, double *v, std::size_t n,
                         double beta1, double beta2, double lr_t, double eps_t)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                const double g = grad[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * (g * g);
                param[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps_t);
            }
        }
    }

    const KernelTable &scalar_kernels()
    {
        static const KernelTable table{"scalar", dot_scalar, axpy_scalar, cdot_scalar, adam_scalar};
        return table;
    }
}
