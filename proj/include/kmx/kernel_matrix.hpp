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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kmx/kernels.hpp"
#include "kmx/matrix.hpp"
#include "kmx/sample.hpp"

namespace kmx {

class PrecomputedKernelMatrix;

/// full() refuses to materialize more than this many elements unless the
/// caller passes allow_huge.
inline constexpr std::uint64_t kFullElementBudget = 100'000'000;

/// Common surface of kernel matrices: element access, views, derived
/// quantities, user attributes, and a display name.
class KernelMatrixBase {
public:
    virtual ~KernelMatrixBase() = default;

    /// Shape is known for constant/precomputed matrices always, and for lazy
    /// matrices once attached.
    virtual bool has_shape() const = 0;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    /// True when the matrix is a Gram matrix over one sample (lazy
    /// single-sample case) or plain square (constant/precomputed). Centering,
    /// normalization, and diagonal require it.
    virtual bool square_case() const = 0;

    virtual double get_element(std::size_t i, std::size_t j) = 0;
    std::vector<double> get_row(std::size_t i);
    /// Duplicate indices permitted.
    Matrix get_submatrix(std::span<const std::size_t> row_ids,
                         std::span<const std::size_t> col_ids);
    virtual Matrix full(std::size_t workers = 1, bool allow_huge = false) = 0;

    std::vector<double> diagonal();
    /// Forces full materialization.
    double frobenius_norm();
    /// ops::center_gram / ops::normalize_gram of full(), wrapped as a
    /// declared-symmetric precomputed matrix. The original is unchanged.
    PrecomputedKernelMatrix centered();
    PrecomputedKernelMatrix normalized();

    void set_attr(const std::string& key, const std::string& value);
    std::optional<std::string> get_attr(const std::string& key) const;
    const std::map<std::string, std::string>& attrs() const { return attrs_; }

    /// Explicit name if set, otherwise "<description> on <n>x<m>".
    std::string name() const;
    void set_name(std::string name) { name_ = std::move(name); }

protected:
    void require_shape() const;
    void check_indices(std::size_t i, std::size_t j) const;
    virtual std::string default_name() const = 0;

private:
    std::map<std::string, std::string> attrs_;
    std::string name_;
};

/// The lazily-evaluated Gram matrix: a kernel bound to one sample (square
/// case, elements mirrored across the diagonal) or two samples (rectangular).
/// Elements are computed on demand and cached; full() computes the remainder
/// in parallel and switches to a dense fast path.
///
/// Concurrency: concurrent reads of cached elements are safe; concurrent
/// get_element on uncached entries may duplicate a computation but never
/// loses or tears a cache entry. Attachment and attribute writes are
/// single-threaded operations.
class KernelMatrix final : public KernelMatrixBase {
public:
    explicit KernelMatrix(KernelPtr kernel);

    /// Binds the sample(s). Required exactly once before any element access.
    void attach(SamplePtr sample_one, SamplePtr sample_two = nullptr);
    bool attached() const { return static_cast<bool>(one_); }

    const KernelFunction& kernel() const { return *kernel_; }
    KernelPtr kernel_ptr() const { return kernel_; }
    SamplePtr sample_one() const { return one_; }
    SamplePtr sample_two() const { return two_; }

    bool has_shape() const override { return attached(); }
    std::size_t rows() const override;
    std::size_t cols() const override;
    bool square_case() const override;

    double get_element(std::size_t i, std::size_t j) override;
    Matrix full(std::size_t workers = 1, bool allow_huge = false) override;

protected:
    std::string default_name() const override;

private:
    double evaluate(std::size_t i, std::size_t j) const;
    std::uint64_t cache_key(std::size_t i, std::size_t j) const;
    void require_attached() const;

    KernelPtr kernel_;
    SamplePtr one_;
    SamplePtr two_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;

    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, double> cache_;
    std::shared_ptr<const Matrix> dense_;
};

/// Every element is the same value; nothing is computed or cached.
class ConstantKernelMatrix final : public KernelMatrixBase {
public:
    ConstantKernelMatrix(double value, std::size_t rows, std::size_t cols);

    double value() const { return value_; }

    bool has_shape() const override { return true; }
    std::size_t rows() const override { return rows_; }
    std::size_t cols() const override { return cols_; }
    bool square_case() const override { return rows_ == cols_; }

    double get_element(std::size_t i, std::size_t j) override;
    Matrix full(std::size_t workers = 1, bool allow_huge = false) override;

protected:
    std::string default_name() const override;

private:
    double value_;
    std::size_t rows_;
    std::size_t cols_;
};

/// A dense, already-computed kernel matrix. When declared symmetric the
/// constructor enforces squareness and max |K - K^T| <= 1e-12 * max |K|.
class PrecomputedKernelMatrix final : public KernelMatrixBase {
public:
    explicit PrecomputedKernelMatrix(Matrix values, bool declared_symmetric = false);

    /// Dense CSV (comma-separated decimal floats, no header).
    static PrecomputedKernelMatrix load_csv(const std::filesystem::path& path,
                                            bool declared_symmetric = false);
    void save_csv(const std::filesystem::path& path) const;

    const Matrix& values() const { return values_; }
    bool declared_symmetric() const { return declared_symmetric_; }

    bool has_shape() const override { return true; }
    std::size_t rows() const override { return values_.rows(); }
    std::size_t cols() const override { return values_.cols(); }
    bool square_case() const override { return values_.rows() == values_.cols(); }

    double get_element(std::size_t i, std::size_t j) override;
    Matrix full(std::size_t workers = 1, bool allow_huge = false) override;

protected:
    std::string default_name() const override;

private:
    Matrix values_;
    bool declared_symmetric_;
};

}  // namespace kmx
