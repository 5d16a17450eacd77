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

#include "kmx/kernel_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "kmx/errors.hpp"
#include "kmx/ops.hpp"
#include "kmx/simd.hpp"

namespace kmx {

// ---------------------------------------------------------------------------
// KernelMatrixBase

void KernelMatrixBase::require_shape() const {
    if (!has_shape()) throw StateError("kernel matrix not attached");
}

void KernelMatrixBase::check_indices(std::size_t i, std::size_t j) const {
    require_shape();
    if (i >= rows() || j >= cols()) {
        throw BoundsError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") out of range for " + std::to_string(rows()) + "x" +
                          std::to_string(cols()));
    }
}

std::vector<double> KernelMatrixBase::get_row(std::size_t i) {
    require_shape();
    if (i >= rows()) {
        throw BoundsError("row " + std::to_string(i) + " out of range for " +
                          std::to_string(rows()) + " rows");
    }
    std::vector<double> out(cols());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = get_element(i, j);
    return out;
}

Matrix KernelMatrixBase::get_submatrix(std::span<const std::size_t> row_ids,
                                       std::span<const std::size_t> col_ids) {
    require_shape();
    for (std::size_t i : row_ids) {
        if (i >= rows()) {
            throw BoundsError("row " + std::to_string(i) + " out of range for " +
                              std::to_string(rows()) + " rows");
        }
    }
    for (std::size_t j : col_ids) {
        if (j >= cols()) {
            throw BoundsError("column " + std::to_string(j) + " out of range for " +
                              std::to_string(cols()) + " columns");
        }
    }
    Matrix out(row_ids.size(), col_ids.size());
    for (std::size_t a = 0; a < row_ids.size(); ++a) {
        for (std::size_t b = 0; b < col_ids.size(); ++b) {
            out(a, b) = get_element(row_ids[a], col_ids[b]);
        }
    }
    return out;
}

std::vector<double> KernelMatrixBase::diagonal() {
    require_shape();
    if (!square_case()) throw ShapeError("diagonal requires the square case");
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_element(i, i);
    return out;
}

double KernelMatrixBase::frobenius_norm() {
    const Matrix k = full();
    return std::sqrt(simd::dot(k.flat(), k.flat()));
}

PrecomputedKernelMatrix KernelMatrixBase::centered() {
    require_shape();
    if (!square_case()) throw ShapeError("centered requires the square case");
    PrecomputedKernelMatrix out(center_gram(full()), true);
    out.set_name(name() + " (centered)");
    return out;
}

PrecomputedKernelMatrix KernelMatrixBase::normalized() {
    require_shape();
    if (!square_case()) throw ShapeError("normalized requires the square case");
    PrecomputedKernelMatrix out(normalize_gram(full()), true);
    out.set_name(name() + " (normalized)");
    return out;
}

void KernelMatrixBase::set_attr(const std::string& key, const std::string& value) {
    attrs_[key] = value;
}

std::optional<std::string> KernelMatrixBase::get_attr(const std::string& key) const {
    auto it = attrs_.find(key);
    if (it == attrs_.end()) return std::nullopt;
    return it->second;
}

std::string KernelMatrixBase::name() const { return name_.empty() ? default_name() : name_; }

// ---------------------------------------------------------------------------
// KernelMatrix (lazy)

KernelMatrix::KernelMatrix(KernelPtr kernel) : kernel_(std::move(kernel)) {
    if (!kernel_) throw ParameterError("KernelMatrix: null kernel");
}

void KernelMatrix::attach(SamplePtr sample_one, SamplePtr sample_two) {
    if (attached()) throw StateError("kernel matrix already attached");
    if (!sample_one) throw ParameterError("attach: null sample");
    kernel_->validate_sample(*sample_one);
    if (sample_two) {
        kernel_->validate_sample(*sample_two);
        if (sample_one->cols() != sample_two->cols()) {
            throw DimensionError("feature dimension mismatch: " +
                                 std::to_string(sample_one->cols()) + " vs " +
                                 std::to_string(sample_two->cols()));
        }
    }
    one_ = std::move(sample_one);
    two_ = std::move(sample_two);
    n_ = one_->rows();
    m_ = two_ ? two_->rows() : n_;
}

std::size_t KernelMatrix::rows() const {
    require_shape();
    return n_;
}

std::size_t KernelMatrix::cols() const {
    require_shape();
    return m_;
}

bool KernelMatrix::square_case() const {
    require_shape();
    return !two_;
}

void KernelMatrix::require_attached() const {
    if (!attached()) throw StateError("kernel matrix not attached");
}

double KernelMatrix::evaluate(std::size_t i, std::size_t j) const {
    const Sample& a = *one_;
    const Sample& b = two_ ? *two_ : *one_;
    if (a.kind() == InputKind::numeric) {
        return kernel_->compute(a.numeric_row(i), b.numeric_row(j));
    }
    return kernel_->compute(a.token_row(i), b.token_row(j));
}

std::uint64_t KernelMatrix::cache_key(std::size_t i, std::size_t j) const {
    // Square case: canonical (min, max) so an element and its mirror share
    // one entry.
    if (!two_ && i > j) std::swap(i, j);
    return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(m_) +
           static_cast<std::uint64_t>(j);
}

double KernelMatrix::get_element(std::size_t i, std::size_t j) {
    require_attached();
    check_indices(i, j);
    const std::uint64_t key = cache_key(i, j);
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (dense_) return (*dense_)(i, j);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    // Kernel evaluation happens outside the lock; a concurrent duplicate
    // computes the same value (purity), and emplace keeps the first entry.
    const double v = evaluate(i, j);
    std::lock_guard<std::mutex> lock(mu_);
    if (dense_) return (*dense_)(i, j);
    return cache_.emplace(key, v).first->second;
}

Matrix KernelMatrix::full(std::size_t workers, bool allow_huge) {
    require_attached();
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (dense_) return *dense_;
    }
    const std::uint64_t elements =
        static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(m_);
    if (elements > kFullElementBudget && !allow_huge) {
        throw CapacityError("full() would materialize " + std::to_string(elements) +
                            " elements (budget " + std::to_string(kFullElementBudget) +
                            "); pass allow_huge to override");
    }

    std::unordered_map<std::uint64_t, double> snapshot;
    {
        std::lock_guard<std::mutex> lock(mu_);
        snapshot = cache_;
    }

    Matrix out(n_, m_);
    const bool sq = square_case();
    auto fill_rows = [&](std::size_t r0, std::size_t r1) {
        // Square case: upper triangle plus diagonal only; mirrored below.
        for (std::size_t i = r0; i < r1; ++i) {
            for (std::size_t j = sq ? i : 0; j < m_; ++j) {
                auto it = snapshot.find(cache_key(i, j));
                out(i, j) = it != snapshot.end() ? it->second : evaluate(i, j);
            }
        }
    };

    std::size_t nworkers = std::max<std::size_t>(workers, 1);
    nworkers = std::min<std::size_t>(nworkers, std::max<std::size_t>(n_, 1));
    if (nworkers <= 1) {
        fill_rows(0, n_);
    } else {
        // Contiguous row blocks into disjoint regions of one buffer; no
        // element-level synchronization, identical output for any count.
        const std::size_t base = n_ / nworkers;
        const std::size_t rem = n_ % nworkers;
        std::vector<std::thread> pool;
        pool.reserve(nworkers - 1);
        std::size_t start = 0;
        for (std::size_t w = 0; w < nworkers; ++w) {
            const std::size_t len = base + (w < rem ? 1 : 0);
            const std::size_t r0 = start;
            const std::size_t r1 = start + len;
            start = r1;
            if (w + 1 == nworkers) {
                fill_rows(r0, r1);
            } else {
                pool.emplace_back(fill_rows, r0, r1);
            }
        }
        for (auto& t : pool) t.join();
    }

    if (sq) {
        for (std::size_t i = 1; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
        }
    }

    std::lock_guard<std::mutex> lock(mu_);
    if (!dense_) {
        dense_ = std::make_shared<const Matrix>(std::move(out));
        cache_.clear();
    }
    return *dense_;
}

std::string KernelMatrix::default_name() const {
    if (!attached()) return kernel_->description() + " (unattached)";
    return kernel_->description() + " on " + std::to_string(n_) + "x" + std::to_string(m_);
}

// ---------------------------------------------------------------------------
// ConstantKernelMatrix

ConstantKernelMatrix::ConstantKernelMatrix(double value, std::size_t rows, std::size_t cols)
    : value_(value), rows_(rows), cols_(cols) {
    if (!std::isfinite(value)) throw ValidationError("constant kernel matrix: non-finite value");
}

double ConstantKernelMatrix::get_element(std::size_t i, std::size_t j) {
    check_indices(i, j);
    return value_;
}

Matrix ConstantKernelMatrix::full(std::size_t, bool allow_huge) {
    const std::uint64_t elements =
        static_cast<std::uint64_t>(rows_) * static_cast<std::uint64_t>(cols_);
    if (elements > kFullElementBudget && !allow_huge) {
        throw CapacityError("full() would materialize " + std::to_string(elements) +
                            " elements (budget " + std::to_string(kFullElementBudget) +
                            "); pass allow_huge to override");
    }
    return Matrix(rows_, cols_, value_);
}

std::string ConstantKernelMatrix::default_name() const {
    return "constant(value=" + format_param_value(value_) + ") on " + std::to_string(rows_) +
           "x" + std::to_string(cols_);
}

// ---------------------------------------------------------------------------
// PrecomputedKernelMatrix

PrecomputedKernelMatrix::PrecomputedKernelMatrix(Matrix values, bool declared_symmetric)
    : values_(std::move(values)), declared_symmetric_(declared_symmetric) {
    if (!values_.all_finite()) {
        throw ValidationError("precomputed kernel matrix: non-finite entry");
    }
    if (declared_symmetric_) {
        if (values_.rows() != values_.cols()) {
            throw ShapeError("declared-symmetric matrix is " + std::to_string(values_.rows()) +
                             "x" + std::to_string(values_.cols()) + ", expected square");
        }
        const double bound = 1e-12 * values_.max_abs();
        const double asym = values_.max_asymmetry();
        if (asym > bound) {
            throw ValidationError("declared-symmetric matrix has max |K - K^T| = " +
                                  std::to_string(asym));
        }
    }
}

PrecomputedKernelMatrix PrecomputedKernelMatrix::load_csv(const std::filesystem::path& path,
                                                          bool declared_symmetric) {
    return PrecomputedKernelMatrix(Matrix::load_csv(path), declared_symmetric);
}

void PrecomputedKernelMatrix::save_csv(const std::filesystem::path& path) const {
    values_.save_csv(path);
}

double PrecomputedKernelMatrix::get_element(std::size_t i, std::size_t j) {
    check_indices(i, j);
    return values_(i, j);
}

Matrix PrecomputedKernelMatrix::full(std::size_t, bool) { return values_; }

std::string PrecomputedKernelMatrix::default_name() const {
    return "precomputed on " + std::to_string(values_.rows()) + "x" +
           std::to_string(values_.cols());
}

}  // namespace kmx
