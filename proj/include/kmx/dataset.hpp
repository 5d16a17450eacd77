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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmx/matrix.hpp"

namespace kmx {

struct LoadOptions {
    bool has_header = false;
    // Default: the last column holds the label.
    std::optional<std::size_t> label_column;
    // With a positive label given, that token maps to +1 and the single
    // remaining token to -1; without it the two distinct tokens map
    // lexicographically to (-1, +1).
    std::optional<std::string> positive_label;
};

struct Dataset {
    std::string name;
    Matrix features;           // n x p, all finite
    std::vector<int> targets;  // -1/+1, both classes present
    // Original label token -> mapped target, sorted by token.
    std::vector<std::pair<std::string, int>> label_mapping;

    std::size_t n() const { return features.rows(); }
    std::size_t p() const { return features.cols(); }
};

// Parses a dense CSV of decimal features plus one label column. Feature
// cells that fail to parse, non-finite values, and ragged rows are rejected
// with line-numbered errors; more than two distinct labels is a multiclass
// error. The dataset name defaults to the file stem.
Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

enum class ScaleMode { none, minmax, zscore };

std::string_view scale_mode_name(ScaleMode mode);
ScaleMode parse_scale_mode(std::string_view name);

// Column statistics come from `train` only; the same affine map is applied
// to `test` (extrapolation permitted, no clipping). Constant train columns
// map to 0 under minmax, zero-std columns to 0 under zscore.
std::pair<Matrix, Matrix> scale_features(const Matrix& train, const Matrix& test,
                                         ScaleMode mode);

}  // namespace kmx
