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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kmx/matrix.hpp"

namespace kmx {

enum class InputKind { numeric, categorical };

const char* input_kind_name(InputKind kind);

/// A sample: n samplets of p features each, either all real-valued or all
/// categorical tokens. Immutable once built; kernel matrices and machines
/// share samples by pointer rather than copying.
class Sample {
public:
    /// Rejects non-finite entries.
    static Sample numeric(Matrix features);
    /// Rejects ragged rows.
    static Sample categorical(std::vector<std::vector<std::string>> rows);

    static std::shared_ptr<const Sample> numeric_ptr(Matrix features);
    static std::shared_ptr<const Sample> categorical_ptr(std::vector<std::vector<std::string>> rows);

    InputKind kind() const { return kind_; }
    std::size_t rows() const;
    std::size_t cols() const { return cols_; }

    /// Numeric access; kind must be numeric.
    std::span<const double> numeric_row(std::size_t i) const;
    const Matrix& features() const;

    /// Categorical access; kind must be categorical.
    const std::vector<std::string>& token_row(std::size_t i) const;

private:
    Sample() = default;

    InputKind kind_ = InputKind::numeric;
    Matrix numeric_;
    std::vector<std::vector<std::string>> tokens_;
    std::size_t cols_ = 0;
};

using SamplePtr = std::shared_ptr<const Sample>;

}  // namespace kmx
