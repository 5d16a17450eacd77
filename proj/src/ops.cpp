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

#include "kmx/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kmx/errors.hpp"
#include "kmx/kernel_set.hpp"
#include "kmx/rng.hpp"
#include "kmx/simd.hpp"
#include "kmx/svm.hpp"

#include "json.hpp"

namespace kmx {

namespace {

void require_square(const Matrix& k, const char* op) {
    if (k.rows() != k.cols()) {
        throw ShapeError(std::string(op) + ": matrix is " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + ", expected square");
    }
}

void require_nonempty(const Matrix& k, const char* op) {
    if (k.rows() == 0 || k.cols() == 0) {
        throw ValidationError(std::string(op) + ": empty matrix");
    }
}

// Row means, and column means summed with the same reduction as the rows so
// that a bitwise-symmetric input yields bitwise-equal vectors.
std::vector<double> row_means(const Matrix& k) {
    std::vector<double> out(k.rows());
    for (std::size_t i = 0; i < k.rows(); ++i) {
        out[i] = simd::reduce_add(k.row(i)) / static_cast<double>(k.cols());
    }
    return out;
}

std::vector<double> col_means(const Matrix& k) {
    std::vector<double> out(k.cols());
    std::vector<double> scratch(k.rows());
    for (std::size_t j = 0; j < k.cols(); ++j) {
        for (std::size_t i = 0; i < k.rows(); ++i) scratch[i] = k(i, j);
        out[j] = simd::reduce_add(scratch) / static_cast<double>(k.rows());
    }
    return out;
}

}  // namespace

Matrix center_gram(const Matrix& k) {
    require_square(k, "center_gram");
    require_nonempty(k, "center_gram");
    if (!k.is_symmetric(1e-12)) {
        throw ValidationError("center_gram: matrix is not symmetric to 1e-12 relative");
    }
    const std::size_t n = k.rows();
    const std::vector<double> rm = row_means(k);
    const std::vector<double> cm = col_means(k);
    const double grand = simd::reduce_add(rm) / static_cast<double>(n);
    // Upper triangle computed, lower mirrored: the result is bitwise
    // symmetric regardless of rounding.
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = (k(i, j) - (rm[i] + cm[j])) + grand;
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

Matrix center_rect(const Matrix& k_test, const Matrix& k_train) {
    require_square(k_train, "center_rect");
    require_nonempty(k_train, "center_rect");
    if (k_test.cols() != k_train.rows()) {
        throw ShapeError("center_rect: k_test has " + std::to_string(k_test.cols()) +
                         " columns but k_train order is " + std::to_string(k_train.rows()));
    }
    const std::size_t n = k_train.rows();
    const std::vector<double> mu = col_means(k_train);
    const double grand = simd::reduce_add(mu) / static_cast<double>(n);
    const std::vector<double> rt = row_means(k_test);
    Matrix out(k_test.rows(), n);
    for (std::size_t t = 0; t < k_test.rows(); ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            out(t, j) = (k_test(t, j) - (rt[t] + mu[j])) + grand;
        }
    }
    return out;
}

Matrix normalize_gram(const Matrix& k) {
    require_square(k, "normalize_gram");
    require_nonempty(k, "normalize_gram");
    const std::size_t n = k.rows();
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = k(i, i);
        if (!(d > 0.0)) {
            throw DegenerateDiagonalError("normalize_gram: diagonal entry " + std::to_string(i) +
                                          " is " + std::to_string(d) +
                                          "; cosine normalization needs a positive diagonal");
        }
        s[i] = std::sqrt(d);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = i == j ? 1.0 : k(i, j) / (s[i] * s[j]);
        }
    }
    return out;
}

double frobenius_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("frobenius_product: shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
    }
    return simd::dot(a.flat(), b.flat());
}

double alignment(const Matrix& k1, const Matrix& k2, bool center) {
    require_square(k1, "alignment");
    if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
        throw ShapeError("alignment: shapes " + std::to_string(k1.rows()) + "x" +
                         std::to_string(k1.cols()) + " and " + std::to_string(k2.rows()) + "x" +
                         std::to_string(k2.cols()) + " differ");
    }
    require_nonempty(k1, "alignment");
    const Matrix a = center ? center_gram(k1) : k1;
    const Matrix b = center ? center_gram(k2) : k2;
    const double n11 = simd::dot(a.flat(), a.flat());
    const double n22 = simd::dot(b.flat(), b.flat());
    if (n11 <= 0.0 || n22 <= 0.0) {
        throw DegenerateAlignmentError(center
                                           ? "alignment: matrix is zero after centering"
                                           : "alignment: zero matrix has no alignment");
    }
    const double n12 = simd::dot(a.flat(), b.flat());
    return n12 / (std::sqrt(n11) * std::sqrt(n22));
}

Matrix target_matrix(std::span<const int> y) {
    if (y.empty()) throw ValidationError("target_matrix: empty label vector");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1 && y[i] != -1) {
            throw ValidationError("target_matrix: label " + std::to_string(y[i]) +
                                  " at position " + std::to_string(i) + "; labels must be -1 or +1");
        }
    }
    const std::size_t n = y.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = static_cast<double>(y[i] * y[j]);
        }
    }
    return out;
}

Matrix hadamard_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("hadamard_product: shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j) * b(i, j);
        }
    }
    return out;
}

Matrix linear_combination(std::span<const Matrix> ks, std::span<const double> w) {
    if (ks.empty()) throw ValidationError("linear_combination: empty matrix list");
    if (ks.size() != w.size()) {
        throw DimensionError("linear_combination: " + std::to_string(ks.size()) +
                             " matrices but " + std::to_string(w.size()) + " weights");
    }
    const std::size_t rows = ks[0].rows();
    const std::size_t cols = ks[0].cols();
    for (std::size_t t = 1; t < ks.size(); ++t) {
        if (ks[t].rows() != rows || ks[t].cols() != cols) {
            throw ShapeError("linear_combination: matrix " + std::to_string(t) + " is " +
                             std::to_string(ks[t].rows()) + "x" + std::to_string(ks[t].cols()) +
                             ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    for (double wt : w) {
        if (!std::isfinite(wt)) throw ValidationError("linear_combination: non-finite weight");
    }
    Matrix out(rows, cols);
    for (std::size_t t = 0; t < ks.size(); ++t) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                out(i, j) += w[t] * ks[t](i, j);
            }
        }
    }
    return out;
}

std::string_view rank_method_name(RankMethod method) {
    switch (method) {
        case RankMethod::alignment: return "alignment";
        case RankMethod::cv_accuracy: return "cv_accuracy";
    }
    return "unknown";
}

RankMethod parse_rank_method(std::string_view name) {
    if (name == "alignment") return RankMethod::alignment;
    if (name == "cv_accuracy") return RankMethod::cv_accuracy;
    throw ParseError("unknown ranking method '" + std::string(name) +
                     "'; valid methods: alignment, cv_accuracy");
}

namespace {

Matrix take(const Matrix& k, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            out(a, b) = k(rows[a], cols[b]);
        }
    }
    return out;
}

// Stratified fold assignment shared by every ranked member: per-class
// shuffles, round-robin deal, fold contents sorted ascending.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, std::size_t folds,
                                                       std::uint64_t seed) {
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < y.size(); ++i) {
        (y[i] == 1 ? pos : neg).push_back(i);
    }
    Rng rng(mix_seed(seed, 0xF01D));
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t i = 0; i < pos.size(); ++i) out[i % folds].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) out[i % folds].push_back(neg[i]);
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

double cv_score(const Matrix& k, std::span<const int> y,
                const std::vector<std::vector<std::size_t>>& fold_test, const CvParams& cv) {
    const std::size_t n = y.size();
    double acc_sum = 0.0;
    std::size_t used_folds = 0;
    for (const auto& test_ids : fold_test) {
        if (test_ids.empty()) continue;
        std::vector<bool> in_test(n, false);
        for (std::size_t t : test_ids) in_test[t] = true;
        std::vector<std::size_t> train_ids;
        train_ids.reserve(n - test_ids.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_test[i]) train_ids.push_back(i);
        }
        std::vector<int> y_train;
        y_train.reserve(train_ids.size());
        bool has_pos = false;
        bool has_neg = false;
        for (std::size_t i : train_ids) {
            y_train.push_back(y[i]);
            (y[i] == 1 ? has_pos : has_neg) = true;
        }
        if (train_ids.size() < 2 || !has_pos || !has_neg) continue;

        SvmConfig cfg;
        cfg.C = cv.C;
        KernelMachine machine(cfg);
        machine.fit_precomputed(take(k, train_ids, train_ids), y_train,
                                mix_seed(cv.seed, 0x1000 + used_folds));
        const std::vector<int> pred =
            machine.predict_precomputed(take(k, test_ids, train_ids));
        std::size_t correct = 0;
        for (std::size_t t = 0; t < test_ids.size(); ++t) {
            if (pred[t] == y[test_ids[t]]) ++correct;
        }
        acc_sum += static_cast<double>(correct) / static_cast<double>(test_ids.size());
        ++used_folds;
    }
    if (used_folds == 0) return std::numeric_limits<double>::quiet_NaN();
    return acc_sum / static_cast<double>(used_folds);
}

}  // namespace

namespace detail {

std::vector<std::pair<std::size_t, double>> rank_indices(const KernelSet& kset,
                                                         std::span<const int> y,
                                                         RankMethod method, const CvParams& cv) {
    if (kset.empty()) throw ValidationError("rank_kernels: empty kernel set");
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < kset.size(); ++i) {
        KernelMatrixBase& m = kset.member(i);
        if (!m.has_shape()) {
            throw StateError("rank_kernels: member " + std::to_string(i) + " (" + m.name() +
                             ") is not attached");
        }
        if (!m.square_case() || m.rows() != n) {
            throw ShapeError("rank_kernels: member " + std::to_string(i) + " (" + m.name() +
                             ") is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                             ", expected square of order " + std::to_string(n));
        }
    }

    std::vector<std::pair<std::size_t, double>> ranked;
    ranked.reserve(kset.size());

    if (method == RankMethod::alignment) {
        const Matrix target = target_matrix(y);
        for (std::size_t i = 0; i < kset.size(); ++i) {
            const Matrix k = kset.member(i).full();
            double score;
            try {
                score = alignment(k, target, true);
            } catch (const DegenerateAlignmentError&) {
                score = std::numeric_limits<double>::quiet_NaN();
            }
            ranked.emplace_back(i, score);
        }
    } else {
        if (cv.folds < 2) {
            throw ParameterError("rank_kernels: cv folds must be >= 2, got " +
                                 std::to_string(cv.folds));
        }
        if (!(cv.C > 0.0)) {
            throw ParameterError("rank_kernels: cv C must be > 0");
        }
        // target_matrix validates the labels; the matrix itself is unused.
        (void)target_matrix(y);
        const auto folds = stratified_folds(y, cv.folds, cv.seed);
        for (std::size_t i = 0; i < kset.size(); ++i) {
            const Matrix k = kset.member(i).full();
            ranked.emplace_back(i, cv_score(k, y, folds, cv));
        }
    }

    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (std::isnan(a.second)) return false;
        if (std::isnan(b.second)) return true;
        return a.second > b.second;
    });
    return ranked;
}

RankingReport make_report(const KernelSet& kset,
                          const std::vector<std::pair<std::size_t, double>>& ranked,
                          RankMethod method) {
    RankingReport report;
    report.method = method;
    report.ranking.reserve(ranked.size());
    for (const auto& [idx, score] : ranked) {
        report.ranking.push_back({kset.member(idx).name(), score});
    }
    return report;
}

}  // namespace detail

RankingReport rank_kernels(const KernelSet& kset, std::span<const int> y, RankMethod method,
                           const CvParams& cv) {
    return detail::make_report(kset, detail::rank_indices(kset, y, method, cv), method);
}

std::string RankingReport::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["method"] = std::string(rank_method_name(method));
    auto arr = nlohmann::ordered_json::array();
    for (const auto& rk : ranking) {
        nlohmann::ordered_json entry;
        entry["name"] = rk.name;
        entry["score"] = rk.score;  // NaN serializes as null
        arr.push_back(std::move(entry));
    }
    j["ranking"] = std::move(arr);
    return j.dump(indent);
}

}  // namespace kmx
