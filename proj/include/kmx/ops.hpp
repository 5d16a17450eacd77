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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmx/matrix.hpp"

namespace kmx {

class KernelSet;

// Stateless kernel-matrix operations. All functions are pure: inputs are
// never mutated and results depend only on the arguments.

// Double-centering Kc = H * K * H with H = I - (1/n) * ones.
// Requires a square matrix, symmetric to 1e-12 relative; the result is
// bitwise symmetric (upper triangle computed, lower mirrored), and every
// row/column sum of the result has magnitude <= 1e-9 * n * max|K|.
Matrix center_gram(const Matrix& k);

// Centers a rectangular test-vs-train kernel with train statistics:
// Kc_test = (K_test - ones * mu^T) * H, where mu holds the column means of
// k_train and H is the train-side centering projector. Coincides with
// center_gram(k_train) when k_test == k_train.
Matrix center_rect(const Matrix& k_test, const Matrix& k_train);

// Cosine normalization K'ij = Kij / sqrt(Kii * Kjj). The diagonal of the
// result is exactly 1.0. Every diagonal entry of the input must be > 0.
Matrix normalize_gram(const Matrix& k);

// Frobenius inner product sum_ij K1ij * K2ij over equal-shape matrices.
double frobenius_product(const Matrix& a, const Matrix& b);

// Kernel-target alignment A = <K1c, K2c>_F / (|K1c|_F * |K2c|_F), with
// double-centering applied to both arguments when `center` is set. A zero
// matrix (after optional centering) has no alignment and raises
// DegenerateAlignmentError.
double alignment(const Matrix& k1, const Matrix& k2, bool center = true);

// Ideal kernel T = y * y^T for labels y in {-1, +1}.
Matrix target_matrix(std::span<const int> y);

// Elementwise product of two equal-shape matrices.
Matrix hadamard_product(const Matrix& a, const Matrix& b);

// Weighted sum sum_i w[i] * ks[i] over equal-shape matrices.
Matrix linear_combination(std::span<const Matrix> ks, std::span<const double> w);

enum class RankMethod {
    alignment,    // centered alignment against the ideal kernel y*y^T
    cv_accuracy,  // mean k-fold cross-validated accuracy of a KernelMachine
};

std::string_view rank_method_name(RankMethod method);
RankMethod parse_rank_method(std::string_view name);

// Parameters for RankMethod::cv_accuracy. Folds are stratified and derived
// deterministically from `seed`, shared across all ranked members.
struct CvParams {
    std::size_t folds = 3;
    double C = 1.0;
    std::uint64_t seed = 0;
};

struct RankedKernel {
    std::string name;
    double score = 0.0;
};

// Scores sorted non-increasing; ties keep insertion order. Members whose
// score is undefined (degenerate alignment, no usable folds) carry NaN and
// sort after every finite score.
struct RankingReport {
    RankMethod method = RankMethod::alignment;
    std::vector<RankedKernel> ranking;

    // {"method": ..., "ranking": [{"name": ..., "score": ...}, ...]};
    // NaN scores serialize as null.
    std::string to_json(int indent = -1) const;
};

RankingReport rank_kernels(const KernelSet& kset, std::span<const int> y,
                           RankMethod method = RankMethod::alignment,
                           const CvParams& cv = {});

namespace detail {

// (member index, score) pairs in ranked order; shared by rank_kernels and
// fit_optimal so both agree on the winner.
std::vector<std::pair<std::size_t, double>> rank_indices(const KernelSet& kset,
                                                         std::span<const int> y,
                                                         RankMethod method,
                                                         const CvParams& cv);

RankingReport make_report(const KernelSet& kset,
                          const std::vector<std::pair<std::size_t, double>>& ranked,
                          RankMethod method);

}  // namespace detail

}  // namespace kmx
