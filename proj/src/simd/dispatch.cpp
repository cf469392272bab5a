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

#include <atomic>
#include <cstdlib>
#include <string>

namespace hrs::simd
{
#ifndef HRS_HAVE_AVX2
    const KernelTable *avx2_kernels() { return nullptr; }
#endif
#ifndef HRS_HAVE_NEON
    const KernelTable *neon_kernels() { return nullptr; }
#endif

    namespace
    {
        bool cpu_has_avx2()
        {
#if defined(HRS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        }

        const KernelTable *by_name(std::string_view name)
        {
            for (const KernelTable *k : available_kernels())
                if (name == k->name)
                    return k;
            return nullptr;
        }

        const KernelTable *initial_choice()
        {
            if (const char *env = std::getenv("HRS_SIMD"))
                if (const KernelTable *k = by_name(env))
                    return k;
            return available_kernels().back();
        }

        std::atomic<const KernelTable *> &slot()
        {
            static std::atomic<const KernelTable *> current{initial_choice()};
            return current;
        }
    }

    std::vector<const KernelTable *> available_kernels()
    {
        std::vector<const KernelTable *> out{&scalar_kernels()};
        if (cpu_has_avx2())
            out.push_back(avx2_kernels());
        if (const KernelTable *neon = neon_kernels())
            out.push_back(neon);
        return out;
    }

    const KernelTable &active() { return *slot().load(std::memory_order_relaxed); }

    bool select(std::string_view name)
    {
        const KernelTable *k = by_name(name);
        if (!k)
            return false;
        slot().store(k, std::memory_order_relaxed);
        return true;
    }
}
