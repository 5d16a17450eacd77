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
#include <utility>
#include <vector>

#include "kmx/kernels.hpp"
#include "kmx/matrix.hpp"
#include "kmx/ops.hpp"
#include "kmx/sample.hpp"

namespace kmx {

class KernelBucket;

struct SvmConfig {
    double C = 1.0;
    double tol = 1e-3;
    std::size_t max_passes = 100;
    std::size_t max_pair_updates_per_sample = 200;
    // Debug-only invariant: asserts the dual objective never decreases
    // across accepted pair updates (costs O(n^2) per update).
    bool check_objective = false;
    std::size_t gram_workers = 1;
};

struct FitReport {
    std::size_t pair_updates = 0;
    std::size_t passes = 0;
    double max_kkt_violation = 0.0;
    std::size_t support_vector_count = 0;
    // True when every training samplet satisfies its KKT condition within
    // tol; false means the iteration budget ran out first and the model is
    // best-effort.
    bool converged = false;
};

// Binary C-SVM trained by sequential minimal optimization. A machine is
// constructed either around a KernelFunction (fit/predict on samples) or
// without one (precomputed Gram workflows only). After fit the machine is
// immutable and safe for concurrent predict calls.
class KernelMachine {
  public:
    explicit KernelMachine(KernelPtr kernel, SvmConfig config = {});
    explicit KernelMachine(SvmConfig config = {});

    // Labels must be -1/+1 with both classes present (binary-only
    // contract), n >= 2. The seed drives the SMO fallback sweep; identical
    // inputs and seed give identical models.
    FitReport fit(SamplePtr x, std::span<const int> y, std::uint64_t seed);
    FitReport fit(const Matrix& x, std::span<const int> y, std::uint64_t seed);

    // Same solver over an explicit Gram matrix (symmetric to 1e-12
    // relative). The resulting machine predicts only through the
    // *_precomputed entry points.
    FitReport fit_precomputed(const Matrix& k_train, std::span<const int> y,
                              std::uint64_t seed);

    // f(x) = sum_i alpha_i y_i k(x_i, x) + b over support vectors, via a
    // rectangular train-by-new KernelMatrix.
    std::vector<double> decision_function(SamplePtr x_new) const;
    std::vector<double> decision_function(const Matrix& x_new) const;
    std::vector<int> predict(SamplePtr x_new) const;
    std::vector<int> predict(const Matrix& x_new) const;

    // k_test_vs_train holds one row per test samplet, one column per
    // training samplet.
    std::vector<double> decision_function_precomputed(const Matrix& k_test_vs_train) const;
    std::vector<int> predict_precomputed(const Matrix& k_test_vs_train) const;

    bool fitted() const { return fitted_; }
    // True when the model was trained through fit_precomputed.
    bool precomputed_trained() const { return fitted_ && !train_; }
    KernelPtr kernel_ptr() const { return kernel_; }
    const SvmConfig& config() const { return config_; }

    std::size_t n_train() const;
    const std::vector<double>& alpha() const;
    double bias() const;
    const std::vector<int>& labels() const;
    // Indices i with alpha_i > 1e-10, ascending.
    std::vector<std::size_t> support_indices() const;
    const FitReport& report() const;

    // Kernel spec string (or "precomputed"), C, tol, alpha, b, support
    // indices/labels, and the stored support samplets as nested arrays
    // (null when trained on a precomputed Gram).
    std::string to_json(int indent = -1) const;

  private:
    FitReport fit_on_gram(const Matrix& k, std::span<const int> y, std::uint64_t seed);
    void require_fitted() const;

    KernelPtr kernel_;
    SvmConfig config_;
    bool fitted_ = false;
    SamplePtr train_;
    std::vector<double> alpha_;
    std::vector<int> y_;
    double b_ = 0.0;
    FitReport report_;
};

// Attaches the bucket to x (unless its members are already sized), ranks
// the members with rank_kernels' scoring, and fits a machine with the
// top-ranked member on all of (x, y). For cv_accuracy ranking the fold seed
// is derived from `seed` and the fold C is taken from `config`; `cv_folds`
// sets the fold count. Sized buckets (precomputed members) are fitted
// through fit_precomputed and x may then be null.
std::pair<KernelMachine, RankingReport> fit_optimal(KernelBucket& bucket, SamplePtr x,
                                                    std::span<const int> y, RankMethod method,
                                                    std::uint64_t seed,
                                                    const SvmConfig& config = {},
                                                    std::size_t cv_folds = 3);

}  // namespace kmx
