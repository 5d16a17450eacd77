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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kmx/kernel_matrix.hpp"
#include "kmx/sample.hpp"

namespace kmx {

// Ordered, homogeneous collection of kernel matrices. The first insertion
// fixes the set's category: either every member is an unattached lazy
// KernelMatrix (no shape yet), or every member is sized and all shapes
// match. Mixing the two, or inserting a mismatched shape, is rejected.
// Members are held by shared pointer; sets created by filter() alias the
// originals rather than copying them.
class KernelSet {
  public:
    using MemberPtr = std::shared_ptr<KernelMatrixBase>;

    KernelSet() = default;

    void add(MemberPtr member);

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<MemberPtr>& members() const { return members_; }

    KernelMatrixBase& member(std::size_t i) const;
    MemberPtr member_ptr(std::size_t i) const;
    std::vector<std::string> names() const;

    // True once the set holds sized members (or has been attached).
    bool has_shape() const { return sized_; }
    std::size_t rows() const;
    std::size_t cols() const;

    // New set holding the members whose attribute `key` equals `value`,
    // original order preserved. This set is unchanged; an empty result is
    // not an error.
    KernelSet filter(const std::string& key, const std::string& value) const;

    // Attaches every member to the same sample(s). Requires every member to
    // be an unattached KernelMatrix; all members are validated against the
    // samples before any of them is attached.
    void attach(SamplePtr sample_one, SamplePtr sample_two = nullptr);

  private:
    void check_bounds(std::size_t i) const;

    std::vector<MemberPtr> members_;
    bool category_fixed_ = false;
    bool sized_ = false;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

// One kernel family plus ordered parameter value lists; the bucket expands
// the cartesian product of the lists.
struct GridEntry {
    std::string family;
    std::vector<std::pair<std::string, std::vector<double>>> params;
};

using GridSpec = std::vector<GridEntry>;

// A KernelSet generated from a grid specification: one unattached
// KernelMatrix per grid point, in deterministic order (families in given
// order, cartesian product in row-major order with the last parameter
// fastest). Every member is named by its kernel description and carries the
// attributes "family" plus each kernel parameter name/value.
class KernelBucket {
  public:
    explicit KernelBucket(const GridSpec& grid);

    // Grid as JSON, e.g. {"gaussian": {"sigma": [0.1, 1.0]},
    // "polynomial": {"degree": [2, 3], "gamma": [1]}}. Family and parameter
    // order follow the document order.
    static KernelBucket from_grid_json(const std::string& json_text);

    // gaussian sigma in {0.05, 0.1, 0.5, 1.0, 2.0}; polynomial (gamma=1,
    // coef0=1) degree in {2, 3, 4}; laplacian gamma in {0.1, 0.5, 1.0}.
    // 11 members, numeric kernels only.
    static GridSpec default_grid();

    const GridSpec& grid() const { return grid_; }
    KernelSet& set() { return set_; }
    const KernelSet& set() const { return set_; }

    std::size_t size() const { return set_.size(); }
    KernelMatrixBase& member(std::size_t i) const { return set_.member(i); }

    void attach(SamplePtr sample_one, SamplePtr sample_two = nullptr);

  private:
    GridSpec grid_;
    KernelSet set_;
};

}  // namespace kmx
