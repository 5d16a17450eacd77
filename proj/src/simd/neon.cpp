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

// NEON variants, 2 doubles per lane, two accumulators. AArch64 only; NEON is
// mandatory there, so no runtime CPU check is needed beyond the build guard.

#include "backends.hpp"

#if defined(KMX_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

namespace kmx::simd::neon {

namespace {

// Fixed reduction order: lane0 + lane1.
inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    for (; i + 2 <= n; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    double acc = hsum(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
        float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
        acc0 = vfmaq_f64(acc0, d, d);
    }
    double acc = hsum(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

double manhattan_distance(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
        acc1 = vaddq_f64(acc1, vabdq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
    }
    for (; i + 2 <= n; i += 2)
        acc0 = vaddq_f64(acc0, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    double acc = hsum(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += std::abs(x[i] - y[i]);
    return acc;
}

double chi_squared_sum(const double* x, const double* y, std::size_t n) {
    // Lanes with x+y == 0 contribute zero: divide by a substituted 1
    // and mask the quotient out.
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t acc0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t xv = vld1q_f64(x + i);
        float64x2_t yv = vld1q_f64(y + i);
        float64x2_t den = vaddq_f64(xv, yv);
        uint64x2_t zero_mask = vceqq_f64(den, zero);
        float64x2_t safe_den = vbslq_f64(zero_mask, one, den);
        float64x2_t d = vsubq_f64(xv, yv);
        float64x2_t q = vdivq_f64(vmulq_f64(d, d), safe_den);
        acc0 = vaddq_f64(acc0, vbslq_f64(zero_mask, zero, q));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) {
        const double den = x[i] + y[i];
        if (den != 0.0) {
            const double d = x[i] - y[i];
            acc += d * d / den;
        }
    }
    return acc;
}

double reduce_add(const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    for (; i + 2 <= n; i += 2) acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    double acc = hsum(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void axpy2(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t t = vmulq_f64(va, vld1q_f64(x + i));
        t = vfmaq_f64(t, vb, vld1q_f64(y + i));
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), t));
    }
    for (; i < n; ++i) out[i] += a * x[i] + b * y[i];
}

}  // namespace kmx::simd::neon

#endif  // KMX_HAVE_NEON
