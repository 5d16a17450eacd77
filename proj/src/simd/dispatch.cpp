// Copyright 2026-present the kmx project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kmx/simd.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>

#include "backends.hpp"

namespace kmx::simd {

namespace detail {

reduce2_fn dot_ptr = &scalar::dot;
reduce2_fn squared_distance_ptr = &scalar::squared_distance;
reduce2_fn manhattan_distance_ptr = &scalar::manhattan_distance;
reduce2_fn chi_squared_sum_ptr = &scalar::chi_squared_sum;
reduce1_fn reduce_add_ptr = &scalar::reduce_add;
axpy2_fn axpy2_ptr = &scalar::axpy2;

}  // namespace detail

namespace {

Backend g_active = Backend::scalar;
std::once_flag g_init_flag;

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(KMX_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
            // NEON is architecturally mandatory on aarch64.
#if defined(KMX_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

// Swap all six entries together so a backend is never half-installed.
void install(Backend b) {
    using namespace detail;
    switch (b) {
#if defined(KMX_HAVE_AVX2)
        case Backend::avx2:
            dot_ptr = &avx2::dot;
            squared_distance_ptr = &avx2::squared_distance;
            manhattan_distance_ptr = &avx2::manhattan_distance;
            chi_squared_sum_ptr = &avx2::chi_squared_sum;
            reduce_add_ptr = &avx2::reduce_add;
            axpy2_ptr = &avx2::axpy2;
            break;
#endif
#if defined(KMX_HAVE_NEON)
        case Backend::neon:
            dot_ptr = &neon::dot;
            squared_distance_ptr = &neon::squared_distance;
            manhattan_distance_ptr = &neon::manhattan_distance;
            chi_squared_sum_ptr = &neon::chi_squared_sum;
            reduce_add_ptr = &neon::reduce_add;
            axpy2_ptr = &neon::axpy2;
            break;
#endif
        default:
            dot_ptr = &scalar::dot;
            squared_distance_ptr = &scalar::squared_distance;
            manhattan_distance_ptr = &scalar::manhattan_distance;
            chi_squared_sum_ptr = &scalar::chi_squared_sum;
            reduce_add_ptr = &scalar::reduce_add;
            axpy2_ptr = &scalar::axpy2;
            b = Backend::scalar;
            break;
    }
    g_active = b;
}

Backend best_available() {
    if (cpu_supports(Backend::avx2)) return Backend::avx2;
    if (cpu_supports(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

void init_from_environment() {
    Backend choice = best_available();
    if (const char* env = std::getenv("KMX_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) {
            choice = Backend::scalar;
        } else if (std::strcmp(env, "avx2") == 0 && cpu_supports(Backend::avx2)) {
            choice = Backend::avx2;
        } else if (std::strcmp(env, "neon") == 0 && cpu_supports(Backend::neon)) {
            choice = Backend::neon;
        }
        // "auto", an unavailable backend, or an unknown value keeps the default.
    }
    install(choice);
}

}  // namespace

namespace detail {

void ensure_initialized() { std::call_once(g_init_flag, init_from_environment); }

}  // namespace detail

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "scalar";
}

Backend active_backend() {
    detail::ensure_initialized();
    return g_active;
}

bool backend_available(Backend b) { return cpu_supports(b); }

bool set_backend(Backend b) {
    detail::ensure_initialized();
    if (!cpu_supports(b)) return false;
    install(b);
    return true;
}

}  // namespace kmx::simd
