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

#pragma once

#include <cassert>
#include <cstddef>
#include <span>

// Runtime-dispatched double-precision reductions backing the kernel
// evaluations and the SMO error update. A scalar reference implementation
// always exists; AVX2 (x86-64) and NEON (aarch64) variants are selected at
// startup when the CPU supports them. The backend can be forced through
// set_backend() or the KMX_SIMD environment variable (scalar|avx2|neon|auto),
// read once before the first dispatch.
//
// Every backend is deterministic: within one process and one backend,
// identical inputs produce bit-identical results. Vector backends may differ
// from scalar in the last few ulps (different accumulation order).

namespace kmx::simd {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Backend currently routed through the dispatch table.
Backend active_backend();

/// Force a backend. Returns false (leaving the selection unchanged) if the
/// backend is not compiled in or the CPU lacks the instructions.
bool set_backend(Backend b);

bool backend_available(Backend b);

namespace detail {
using reduce2_fn = double (*)(const double*, const double*, std::size_t);
using reduce1_fn = double (*)(const double*, std::size_t);
using axpy2_fn = void (*)(double, const double*, double, const double*, double*, std::size_t);

extern reduce2_fn dot_ptr;
extern reduce2_fn squared_distance_ptr;
extern reduce2_fn manhattan_distance_ptr;
extern reduce2_fn chi_squared_sum_ptr;
extern reduce1_fn reduce_add_ptr;
extern axpy2_fn axpy2_ptr;
void ensure_initialized();
}  // namespace detail

/// sum_i x[i]*y[i]
inline double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    detail::ensure_initialized();
    return detail::dot_ptr(x.data(), y.data(), x.size());
}

/// sum_i (x[i]-y[i])^2
inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    detail::ensure_initialized();
    return detail::squared_distance_ptr(x.data(), y.data(), x.size());
}

/// sum_i |x[i]-y[i]|
inline double manhattan_distance(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    detail::ensure_initialized();
    return detail::manhattan_distance_ptr(x.data(), y.data(), x.size());
}

/// sum_i (x[i]-y[i])^2 / (x[i]+y[i]), where coordinates with x[i]+y[i] == 0
/// contribute zero. Intended for nonnegative inputs.
inline double chi_squared_sum(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    detail::ensure_initialized();
    return detail::chi_squared_sum_ptr(x.data(), y.data(), x.size());
}

/// sum_i x[i]
inline double reduce_add(std::span<const double> x) {
    detail::ensure_initialized();
    return detail::reduce_add_ptr(x.data(), x.size());
}

/// out[i] += a*x[i] + b*y[i] (the SMO error-cache update)
inline void axpy2(double a, std::span<const double> x, double b, std::span<const double> y,
                  std::span<double> out) {
    assert(x.size() == y.size() && x.size() == out.size());
    detail::ensure_initialized();
    detail::axpy2_ptr(a, x.data(), b, y.data(), out.data(), out.size());
}

}  // namespace kmx::simd
