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
#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops. Every kernel has a scalar reference in
// kernels_scalar.cpp; vector variants (AVX2+FMA on x86-64, NEON on aarch64)
// live in their own translation units and are picked once at startup.
// Set HRS_SIMD=scalar (or avx2 / neon) to force a variant.

namespace hrs::simd
{
    struct KernelTable
    {
        const char *name;

        // sum_i a[i] * b[i]
        double (*dot)(const double *a, const double *b, std::size_t n);

        // y[i] += alpha * x[i]
        void (*axpy)(double alpha, const double *x, double *y, std::size_t n);

        // sum_i conj(a[i]) * b[i]
        std::complex<double> (*cdot)(const std::complex<double> *a, const std::complex<double> *b, std::size_t n);

        // Bias-corrected Adam update of n parameters in place.
        // lr_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t), eps_t = eps * sqrt(1 - beta2^t)
        void (*adam)(double *param, const double *grad, double *m, double *v, std::size_t n,
                     double beta1, double beta2, double lr_t, double eps_t);
    };

    const KernelTable &scalar_kernels();
    const KernelTable *avx2_kernels(); // nullptr when not compiled in
    const KernelTable *neon_kernels(); // nullptr when not compiled in

    // All variants usable on this CPU, scalar first.
    std::vector<const KernelTable *> available_kernels();

    // Selected once: HRS_SIMD override, otherwise the widest supported variant.
    const KernelTable &active();

    // Force a variant by name ("scalar", "avx2", "neon"); returns false if unavailable.
    bool select(std::string_view name);

    inline double dot(const double *a, const double *b, std::size_t n) { return active().dot(a, b, n); }
    inline void axpy(double alpha, const double *x, double *y, std::size_t n) { active().axpy(alpha, x, y, n); }
    inline std::complex<double> cdot(const std::complex<double> *a, const std::complex<double> *b, std::size_t n)
    {
        return active().cdot(a, b, n);
    }
}
