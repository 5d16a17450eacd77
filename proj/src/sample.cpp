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

#include "kmx/sample.hpp"

#include <cmath>
#include <utility>

#include "kmx/errors.hpp"

namespace kmx {

const char* input_kind_name(InputKind kind) {
    return kind == InputKind::numeric ? "numeric" : "categorical";
}

Sample Sample::numeric(Matrix features) {
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) {
            if (!std::isfinite(features(i, j))) {
                throw ValidationError("non-finite feature at row " + std::to_string(i) +
                                      ", column " + std::to_string(j));
            }
        }
    }
    Sample s;
    s.kind_ = InputKind::numeric;
    s.cols_ = features.cols();
    s.numeric_ = std::move(features);
    return s;
}

Sample Sample::categorical(std::vector<std::vector<std::string>> rows) {
    Sample s;
    s.kind_ = InputKind::categorical;
    s.cols_ = rows.empty() ? 0 : rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != s.cols_) {
            throw ShapeError("ragged token rows: row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " +
                             std::to_string(s.cols_));
        }
    }
    s.tokens_ = std::move(rows);
    return s;
}

std::shared_ptr<const Sample> Sample::numeric_ptr(Matrix features) {
    return std::make_shared<const Sample>(numeric(std::move(features)));
}

std::shared_ptr<const Sample> Sample::categorical_ptr(std::vector<std::vector<std::string>> rows) {
    return std::make_shared<const Sample>(categorical(std::move(rows)));
}

std::size_t Sample::rows() const {
    return kind_ == InputKind::numeric ? numeric_.rows() : tokens_.size();
}

std::span<const double> Sample::numeric_row(std::size_t i) const {
    if (kind_ != InputKind::numeric) throw StateError("numeric_row on a categorical sample");
    return numeric_.row(i);
}

const Matrix& Sample::features() const {
    if (kind_ != InputKind::numeric) throw StateError("features() on a categorical sample");
    return numeric_;
}

const std::vector<std::string>& Sample::token_row(std::size_t i) const {
    if (kind_ != InputKind::categorical) throw StateError("token_row on a numeric sample");
    return tokens_.at(i);
}

}  // namespace kmx
