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

// Advanced SIMD (NEON) variant for aarch64, where it is architecturally guaranteed.

#include "hrs/simd/kernels.hpp"

#include <arm_neon.h>
#include <cmath>

namespace hrs::simd
{
    namespace
    {
        double dot_neon(const double *a, const double *b, std::size_t n)
        {
            float64x2_t acc0 = vdupq_n_f64(0.0);
            float64x2_t acc1 = vdupq_n_f64(0.0);
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
                acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
            }
            double s = vaddvq_f64(vaddq_f64(acc0, acc1));
            for (; i < n; ++i)
                s += a[i] * b[i];
            return s;
        }

        void axpy_neon(double alpha, const double *x, double *y, std::size_t n)
        {
            const float64x2_t va = vdupq_n_f64(alpha);
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
                vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
            for (; i < n; ++i)
                y[i] += alpha * x[i];
        }

        std::complex<double> cdot_neon(const std::complex<double> *a, const std::complex<double> *b, std::size_t n)
        {
            const double *pa = reinterpret_cast<const double *>(a);
            const double *pb = reinterpret_cast<const double *>(b);
            float64x2_t acc_re = vdupq_n_f64(0.0);
            float64x2_t acc_im = vdupq_n_f64(0.0);
            for (std::size_t i = 0; i < n; ++i)
            {
                const float64x2_t va = vld1q_f64(pa + 2 * i);
                const float64x2_t vb = vld1q_f64(pb + 2 * i);
                acc_re = vfmaq_f64(acc_re, va, vb);
                acc_im = vfmaq_f64(acc_im, va, vextq_f64(vb, vb, 1));
            }
            const double re = vgetq_lane_f64(acc_re, 0) + vgetq_lane_f64(acc_re, 1);
            const double im = vgetq_lane_f64(acc_im, 0) - vgetq_lane_f64(acc_im, 1);
            return {re, im};
        }

        void adam_neon(double *param, const double *grad, double *m, double *v, std::size_t n,
                       double beta1, double beta2, double lr_t, double eps_t)
        {
            const float64x2_t b1 = vdupq_n_f64(beta1), c1 = vdupq_n_f64(1.0 - beta1);
            const float64x2_t b2 = vdupq_n_f64(beta2), c2 = vdupq_n_f64(1.0 - beta2);
            const float64x2_t lr = vdupq_n_f64(lr_t), eps = vdupq_n_f64(eps_t);
            std::size_t i = 0;
            for (; i + 2 <= n; i += 2)
            {
                const float64x2_t g = vld1q_f64(grad + i);
                float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(c1, g));
                float64x2_t vv = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(c2, vmulq_f64(g, g)));
                float64x2_t step = vdivq_f64(vmulq_f64(lr, vm), vaddq_f64(vsqrtq_f64(vv), eps));
                vst1q_f64(m + i, vm);
                vst1q_f64(v + i, vv);
                vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
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

    const KernelTable *neon_kernels()
    {
        static const KernelTable table{"neon", dot_neon, axpy_neon, cdot_neon, adam_neon};
        return &table;
    }
}
