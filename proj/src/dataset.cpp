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

#include "kmx/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "kmx/errors.hpp"

namespace kmx {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(trim(line.substr(start)));
            break;
        }
        out.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

double parse_feature(const std::string& cell, std::size_t line_no, std::size_t col) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || cell.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + cell +
                         "' (column " + std::to_string(col) + ") as a number");
    }
    if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + cell +
                         "' (column " + std::to_string(col) + ")");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t ncols = 0;
    std::size_t label_col = 0;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (rows.empty() && labels.empty()) {
            ncols = cells.size();
            if (ncols < 2) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": need at least 2 columns (features plus label), got " +
                                 std::to_string(ncols));
            }
            label_col = options.label_column.value_or(ncols - 1);
            if (label_col >= ncols) {
                throw ParseError("label column " + std::to_string(label_col) +
                                 " out of range for " + std::to_string(ncols) + " columns");
            }
        } else if (cells.size() != ncols) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(ncols) + " columns, got " +
                             std::to_string(cells.size()));
        }
        std::vector<double> feat;
        feat.reserve(ncols - 1);
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c == label_col) continue;
            feat.push_back(parse_feature(cells[c], line_no, c));
        }
        rows.push_back(std::move(feat));
        labels.push_back(cells[label_col]);
    }
    if (rows.empty()) throw ParseError("'" + path.string() + "' holds no data rows");

    std::map<std::string, int> mapping;
    for (const std::string& token : labels) mapping.emplace(token, 0);
    if (mapping.size() > 2) {
        std::string listed;
        for (const auto& [token, unused] : mapping) {
            if (!listed.empty()) listed += ", ";
            listed += "'" + token + "'";
        }
        throw MulticlassError("found " + std::to_string(mapping.size()) +
                              " distinct labels (" + listed +
                              "); this library is binary-only");
    }
    if (mapping.size() < 2) {
        throw ValidationError("only one class ('" + mapping.begin()->first +
                              "') present in '" + path.string() + "'");
    }
    if (options.positive_label) {
        auto it = mapping.find(*options.positive_label);
        if (it == mapping.end()) {
            throw ValidationError("positive label '" + *options.positive_label +
                                  "' does not occur in '" + path.string() + "'");
        }
        for (auto& [token, target] : mapping) {
            target = token == *options.positive_label ? 1 : -1;
        }
    } else {
        // std::map iterates lexicographically: first token -> -1, second -> +1.
        int next = -1;
        for (auto& [token, target] : mapping) {
            target = next;
            next = 1;
        }
    }

    Dataset ds;
    ds.name = path.stem().string();
    ds.features = Matrix::from_rows(rows);
    ds.targets.reserve(labels.size());
    for (const std::string& token : labels) ds.targets.push_back(mapping.at(token));
    ds.label_mapping.assign(mapping.begin(), mapping.end());
    return ds;
}

std::string_view scale_mode_name(ScaleMode mode) {
    switch (mode) {
        case ScaleMode::none: return "none";
        case ScaleMode::minmax: return "minmax";
        case ScaleMode::zscore: return "zscore";
    }
    return "unknown";
}

ScaleMode parse_scale_mode(std::string_view name) {
    if (name == "none") return ScaleMode::none;
    if (name == "minmax") return ScaleMode::minmax;
    if (name == "zscore") return ScaleMode::zscore;
    throw ParseError("unknown scale mode '" + std::string(name) +
                     "'; valid modes: none, minmax, zscore");
}

std::pair<Matrix, Matrix> scale_features(const Matrix& train, const Matrix& test,
                                         ScaleMode mode) {
    if (test.rows() > 0 && train.cols() != test.cols()) {
        throw ShapeError("scale_features: train has " + std::to_string(train.cols()) +
                         " columns, test has " + std::to_string(test.cols()));
    }
    if (mode == ScaleMode::none) return {train, test};
    if (train.rows() == 0) throw ValidationError("scale_features: empty train split");

    const std::size_t p = train.cols();
    // Affine map x -> (x - shift[j]) * scale[j]; degenerate columns get
    // scale 0 so every value maps to 0.
    std::vector<double> shift(p, 0.0);
    std::vector<double> scale(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        if (mode == ScaleMode::minmax) {
            double mn = train(0, j);
            double mx = train(0, j);
            for (std::size_t i = 1; i < train.rows(); ++i) {
                mn = std::min(mn, train(i, j));
                mx = std::max(mx, train(i, j));
            }
            shift[j] = mn;
            scale[j] = mx > mn ? 1.0 / (mx - mn) : 0.0;
        } else {
            double sum = 0.0;
            for (std::size_t i = 0; i < train.rows(); ++i) sum += train(i, j);
            const double mean = sum / static_cast<double>(train.rows());
            double sq = 0.0;
            for (std::size_t i = 0; i < train.rows(); ++i) {
                const double d = train(i, j) - mean;
                sq += d * d;
            }
            const double sd = std::sqrt(sq / static_cast<double>(train.rows()));
            shift[j] = mean;
            scale[j] = sd > 0.0 ? 1.0 / sd : 0.0;
        }
    }
    auto apply = [&](const Matrix& src) {
        Matrix out(src.rows(), src.cols());
        for (std::size_t i = 0; i < src.rows(); ++i) {
            for (std::size_t j = 0; j < src.cols(); ++j) {
                out(i, j) = (src(i, j) - shift[j]) * scale[j];
            }
        }
        return out;
    };
    return {apply(train), apply(test)};
}

}  // namespace kmx
