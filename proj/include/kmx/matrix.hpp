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
#include <filesystem>
#include <initializer_list>
#include <span>
#include <vector>

namespace kmx {

/// Dense row-major matrix of doubles. Storage is contiguous, so a row is a
/// span and the whole matrix flattens to one span for reductions.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<const double> row(std::size_t i) const {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) {
        assert(i < rows_);
        return {data_.data() + i * cols_, cols_};
    }

    std::span<const double> flat() const { return {data_.data(), data_.size()}; }
    std::span<double> flat() { return {data_.data(), data_.size()}; }
    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }

    Matrix transposed() const;

    double max_abs() const;
    /// max |A - A^T|; zero for an empty or 1x1 matrix. Requires square.
    double max_asymmetry() const;
    /// Symmetric within rel_tol relative to the largest magnitude entry.
    bool is_symmetric(double rel_tol = 1e-12) const;
    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

    /// Dense CSV, comma-separated decimal floats, no header. Values are
    /// written with enough digits to round-trip exactly.
    void save_csv(const std::filesystem::path& path) const;
    static Matrix load_csv(const std::filesystem::path& path);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace kmx
