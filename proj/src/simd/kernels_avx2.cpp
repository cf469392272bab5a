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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "hrs/simd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace hrs::simd
{
    namespace
    {
        inline double hsum(__m256d v)
        {
            __m128d lo = _mm256_castpd256_pd128(v);
            __m128d hi = _mm256_extractf128_pd(v, 1);
            lo = _mm_add_pd(lo, hi);
            __m128d sh = _mm_unpackhi_pd(lo, lo);
            return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
        }

        double dot_avx2(const double *a, const double *b, std::size_t n)
        {
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            __m256d acc2 = _mm256_setzero_pd();
            __m256d acc3 = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 16 <= n; i += 16)
            {
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
                acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
                acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
                acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
            }
            for (; i + 4 <= n; i += 4)
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
            double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
            for (; i < n; ++i)
                s += a[i] * b[i];
            return s;
        }

        void axpy_avx2(double alpha, const double *x, double *y, std::size_t n)
        {
            const __m256d va = _mm256_set1_pd(alpha);
            std::size_t i = 0;
            for (; i + 8 <= n; i += 8)
            {
                __m256d y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
                __m256d y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
                _mm256_storeu_pd(y + i, y0);
                _mm256_storeu_pd(y + i + 4, y1);
            }
            for (; i + 4 <= n; i += 4)
                _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
            for (; i < n; ++i)
                y[i] += alpha * x[i];
        }

        // Interleaved (re, im) layout: two complex values per register.
        std::complex<double> cdot_avx2(const std::complex<double> *a, const std::complex<double> *b, std::size_t n)
        {
            const double *pa = reinterpret_cast<const double *>(a);
            const double *pb = reinterpret_cast<const double *>(b);
            __m256d acc_re = _mm256_setzero_pd(); // ar*br, ai*bi
            __m256d acc_im = _mm256_setzero_pd(); // ar*bi, ai*br
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const __m256d va = _mm256_loadu_pd(pa + 2 * i);
                const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
                acc_re = _mm256_fmadd_pd(va, vb, acc_re);
                acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
            }
            alignas(32) double re_parts[4], im_parts[4];
            _mm256_store_pd(re_parts, acc_re);
            _mm256_store_pd(im_parts, acc_im);
            double re = (re_parts[0] + re_parts[2]) + (re_parts[1] + re_parts[3]);
            double im = (im_parts[0] + im_parts[2]) - (im_parts[1] + im_parts[3]);
            for (; i < n; ++i)
            {
                re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
                im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
            }
            return {re, im};
        }

        void adam_avx2(double *param, const double *grad, double *m, double *v, std::size_t n,
                       double beta1, double beta2, double lr_t, double eps_t)
        {
            const __m256d b1 = _mm256_set1_pd(beta1), c1 = _mm256_set1_pd(1.0 - beta1);
            const __m256d b2 = _mm256_set1_pd(beta2), c2 = _mm256_set1_pd(1.0 - beta2);
            const __m256d lr = _mm256_set1_pd(lr_t), eps = _mm256_set1_pd(eps_t);
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                const __m256d g = _mm256_loadu_pd(grad + i);
                __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1, g));
                __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                           _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
                __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, vm), _mm256_add_pd(_mm256_sqrt_pd(vv), eps));
                _mm256_storeu_pd(m + i, vm);
                _mm256_storeu_pd(v + i, vv);
                _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
            }
            for (; i < n; ++i)
            {
                const double gi = grad[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
                v[i] = beta2 * v[i] + (1.0 - beta2) * (gi * gi);
                param[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps_t);
            }
        }
    }

    const KernelTable *avx2_kernels()
    {
        static const KernelTable table{"avx2", dot_avx2, axpy_avx2, cdot_avx2, adam_avx2};
        return &table;
    }
}
