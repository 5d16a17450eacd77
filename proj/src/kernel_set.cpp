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

#include "kmx/kernel_set.hpp"

#include <set>

#include "kmx/errors.hpp"
#include "kmx/kernels.hpp"

#include "json.hpp"

namespace kmx {

// ---------------------------------------------------------------------------
// KernelSet

void KernelSet::add(MemberPtr member) {
    if (!member) throw ParameterError("KernelSet::add: null member");
    const bool member_sized = member->has_shape();
    if (!category_fixed_) {
        category_fixed_ = true;
        sized_ = member_sized;
        if (sized_) {
            rows_ = member->rows();
            cols_ = member->cols();
        }
    } else if (member_sized != sized_) {
        throw CompatibilityError(sized_
                                     ? "cannot add an unattached member to a set of sized matrices"
                                     : "cannot add a sized member to a set of unattached matrices");
    } else if (sized_ && (member->rows() != rows_ || member->cols() != cols_)) {
        throw CompatibilityError("member shape " + std::to_string(member->rows()) + "x" +
                                 std::to_string(member->cols()) + " does not match set shape " +
                                 std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    members_.push_back(std::move(member));
}

void KernelSet::check_bounds(std::size_t i) const {
    if (i >= members_.size()) {
        throw BoundsError("member " + std::to_string(i) + " out of range for set of " +
                          std::to_string(members_.size()));
    }
}

KernelMatrixBase& KernelSet::member(std::size_t i) const {
    check_bounds(i);
    return *members_[i];
}

KernelSet::MemberPtr KernelSet::member_ptr(std::size_t i) const {
    check_bounds(i);
    return members_[i];
}

std::vector<std::string> KernelSet::names() const {
    std::vector<std::string> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m->name());
    return out;
}

std::size_t KernelSet::rows() const {
    if (!sized_) throw StateError("kernel set has no shape yet");
    return rows_;
}

std::size_t KernelSet::cols() const {
    if (!sized_) throw StateError("kernel set has no shape yet");
    return cols_;
}

KernelSet KernelSet::filter(const std::string& key, const std::string& value) const {
    KernelSet out;
    for (const auto& m : members_) {
        if (m->get_attr(key) == value) out.add(m);
    }
    return out;
}

void KernelSet::attach(SamplePtr sample_one, SamplePtr sample_two) {
    if (!sample_one) throw ParameterError("attach: null sample");
    // Validate every member before mutating any, so a failure cannot leave
    // the set half attached.
    std::vector<KernelMatrix*> lazies;
    lazies.reserve(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        auto* lazy = dynamic_cast<KernelMatrix*>(members_[i].get());
        if (!lazy) {
            throw StateError("member " + std::to_string(i) + " (" + members_[i]->name() +
                             ") is not a lazy kernel matrix; attach needs unattached members");
        }
        if (lazy->attached()) {
            throw StateError("member " + std::to_string(i) + " (" + members_[i]->name() +
                             ") is already attached");
        }
        lazy->kernel().validate_sample(*sample_one);
        if (sample_two) {
            lazy->kernel().validate_sample(*sample_two);
            if (sample_one->cols() != sample_two->cols()) {
                throw DimensionError("feature dimension mismatch: " +
                                     std::to_string(sample_one->cols()) + " vs " +
                                     std::to_string(sample_two->cols()));
            }
        }
        lazies.push_back(lazy);
    }
    for (auto* lazy : lazies) lazy->attach(sample_one, sample_two);
    if (!lazies.empty()) {
        category_fixed_ = true;
        sized_ = true;
        rows_ = lazies.front()->rows();
        cols_ = lazies.front()->cols();
    }
}

// ---------------------------------------------------------------------------
// KernelBucket

namespace {

KernelPtr make_grid_kernel(const std::string& family,
                           const std::vector<std::pair<std::string, double>>& params) {
    try {
        return make_kernel(family, params);
    } catch (const ParseError& e) {
        // The registry reports unknown names/parameters as parse errors;
        // from a grid they are parameter errors.
        throw ParameterError(e.what());
    }
}

}  // namespace

KernelBucket::KernelBucket(const GridSpec& grid) : grid_(grid) {
    for (const auto& entry : grid_) {
        if (entry.family.empty()) throw ParameterError("grid entry with empty kernel family");
        std::set<std::string> seen;
        for (const auto& [pname, values] : entry.params) {
            if (!seen.insert(pname).second) {
                throw ParameterError("duplicate parameter '" + pname + "' for family '" +
                                     entry.family + "'");
            }
            if (values.empty()) {
                throw ParameterError("empty value list for parameter '" + pname +
                                     "' of family '" + entry.family + "'");
            }
        }
        // Row-major cartesian product: the last parameter varies fastest.
        const std::size_t npar = entry.params.size();
        std::vector<std::size_t> idx(npar, 0);
        bool done = false;
        do {
            std::vector<std::pair<std::string, double>> chosen;
            chosen.reserve(npar);
            for (std::size_t p = 0; p < npar; ++p) {
                chosen.emplace_back(entry.params[p].first, entry.params[p].second[idx[p]]);
            }
            KernelPtr kernel = make_grid_kernel(entry.family, chosen);
            auto km = std::make_shared<KernelMatrix>(kernel);
            km->set_name(kernel->description());
            km->set_attr("family", kernel->name());
            for (const auto& [pname, pvalue] : kernel->param_strings()) {
                km->set_attr(pname, pvalue);
            }
            set_.add(std::move(km));

            done = true;
            for (std::size_t p = npar; p > 0; --p) {
                if (++idx[p - 1] < entry.params[p - 1].second.size()) {
                    done = false;
                    break;
                }
                idx[p - 1] = 0;
            }
        } while (!done);
    }
}

KernelBucket KernelBucket::from_grid_json(const std::string& json_text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("grid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("grid JSON must be an object of family -> parameters");
    GridSpec grid;
    for (const auto& [family, params] : doc.items()) {
        if (!params.is_object()) {
            throw ParseError("grid JSON: value for '" + family +
                             "' must be an object of parameter -> value list");
        }
        GridEntry entry;
        entry.family = family;
        for (const auto& [pname, values] : params.items()) {
            if (!values.is_array()) {
                throw ParseError("grid JSON: values for '" + family + "." + pname +
                                 "' must be an array of numbers");
            }
            std::vector<double> list;
            list.reserve(values.size());
            for (const auto& v : values) {
                if (!v.is_number()) {
                    throw ParseError("grid JSON: non-numeric value for '" + family + "." +
                                     pname + "'");
                }
                list.push_back(v.get<double>());
            }
            entry.params.emplace_back(pname, std::move(list));
        }
        grid.push_back(std::move(entry));
    }
    return KernelBucket(grid);
}

GridSpec KernelBucket::default_grid() {
    return {
        {"gaussian", {{"sigma", {0.05, 0.1, 0.5, 1.0, 2.0}}}},
        {"polynomial", {{"gamma", {1.0}}, {"degree", {2.0, 3.0, 4.0}}, {"coef0", {1.0}}}},
        {"laplacian", {{"gamma", {0.1, 0.5, 1.0}}}},
    };
}

void KernelBucket::attach(SamplePtr sample_one, SamplePtr sample_two) {
    set_.attach(std::move(sample_one), std::move(sample_two));
}

}  // namespace kmx
