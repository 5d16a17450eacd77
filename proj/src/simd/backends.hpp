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

#include <cstddef>

// Per-ISA entry points behind the dispatch table. Exposed (rather than kept
// static in their translation units) so the equivalence tests can call each
// backend directly against the scalar reference.

namespace kmx::simd {

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
double squared_distance(const double* x, const double* y, std::size_t n);
double manhattan_distance(const double* x, const double* y, std::size_t n);
double chi_squared_sum(const double* x, const double* y, std::size_t n);
double reduce_add(const double* x, std::size_t n);
void axpy2(double a, const double* x, double b, const double* y, double* out, std::size_t n);
}  // namespace scalar

#if defined(KMX_HAVE_AVX2)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
double squared_distance(const double* x, const double* y, std::size_t n);
double manhattan_distance(const double* x, const double* y, std::size_t n);
double chi_squared_sum(const double* x, const double* y, std::size_t n);
double reduce_add(const double* x, std::size_t n);
void axpy2(double a, const double* x, double b, const double* y, double* out, std::size_t n);
}  // namespace avx2
#endif

#if defined(KMX_HAVE_NEON)
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
double squared_distance(const double* x, const double* y, std::size_t n);
double manhattan_distance(const double* x, const double* y, std::size_t n);
double chi_squared_sum(const double* x, const double* y, std::size_t n);
double reduce_add(const double* x, std::size_t n);
void axpy2(double a, const double* x, double b, const double* y, double* out, std::size_t n);
}  // namespace neon
#endif

}  // namespace kmx::simd
