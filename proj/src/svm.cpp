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

#include "kmx/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "kmx/errors.hpp"
#include "kmx/kernel_matrix.hpp"
#include "kmx/kernel_set.hpp"
#include "kmx/rng.hpp"
#include "kmx/simd.hpp"

#include "json.hpp"

namespace kmx {

namespace {

constexpr double kAlphaEps = 1e-12;         // box-boundary slack
constexpr double kSupportThreshold = 1e-10;  // alpha above this is a support vector

void validate_config(const SvmConfig& cfg) {
    if (!(cfg.C > 0.0)) throw ParameterError("svm: C must be > 0");
    if (!(cfg.tol > 0.0)) throw ParameterError("svm: tol must be > 0");
    if (cfg.max_passes < 1) throw ParameterError("svm: max_passes must be >= 1");
    if (cfg.max_pair_updates_per_sample < 1) {
        throw ParameterError("svm: max_pair_updates_per_sample must be >= 1");
    }
}

void validate_labels(std::span<const int> y) {
    if (y.size() < 2) {
        throw ValidationError("fit: need at least 2 training samplets, got " +
                              std::to_string(y.size()));
    }
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            has_pos = true;
        } else if (y[i] == -1) {
            has_neg = true;
        } else {
            throw ValidationError("fit: label " + std::to_string(y[i]) + " at position " +
                                  std::to_string(i) +
                                  "; this machine is binary-only, labels must be -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("fit: both classes must be present (binary-only contract)");
    }
}

struct SmoState {
    const Matrix& k;
    std::span<const int> y;
    const SvmConfig& cfg;
    std::vector<double> alpha;
    std::vector<double> err;  // E_i = f_i - y_i, maintained incrementally
    double b = 0.0;
    std::size_t pair_updates = 0;
};

// W(alpha) = sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij,
// the maximized dual objective. Debug-mode monotonicity check only.
double dual_objective(const SmoState& s) {
    const std::size_t n = s.y.size();
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        linear += s.alpha[i];
        if (s.alpha[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            quad += s.alpha[i] * s.alpha[j] * s.y[i] * s.y[j] * s.k(i, j);
        }
    }
    return linear - 0.5 * quad;
}

// One analytic pair update. Returns true when alpha actually moved.
bool try_step(SmoState& s, std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double C = s.cfg.C;
    const double a1 = s.alpha[i1];
    const double a2 = s.alpha[i2];
    const double y1 = s.y[i1];
    const double y2 = s.y[i2];
    const double E1 = s.err[i1];
    const double E2 = s.err[i2];
    const double sgn = y1 * y2;

    double L, H;
    if (s.y[i1] != s.y[i2]) {
        L = std::max(0.0, a2 - a1);
        H = std::min(C, C + a2 - a1);
    } else {
        L = std::max(0.0, a1 + a2 - C);
        H = std::min(C, a1 + a2);
    }
    if (H - L < kAlphaEps) return false;

    const double k11 = s.k(i1, i1);
    const double k12 = s.k(i1, i2);
    const double k22 = s.k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2new;
    if (eta > 0.0) {
        a2new = a2 + y2 * (E1 - E2) / eta;
        if (a2new < L) {
            a2new = L;
        } else if (a2new > H) {
            a2new = H;
        }
    } else {
        // Flat or concave along the pair direction: compare the objective at
        // the segment endpoints and move only on a strict improvement.
        const double f1 = y1 * (E1 + s.b) - a1 * k11 - sgn * a2 * k12;
        const double f2 = y2 * (E2 + s.b) - sgn * a1 * k12 - a2 * k22;
        const double L1 = a1 + sgn * (a2 - L);
        const double H1 = a1 + sgn * (a2 - H);
        const double psi_l =
            L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + sgn * L * L1 * k12;
        const double psi_h =
            H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + sgn * H * H1 * k12;
        if (psi_l < psi_h - kAlphaEps) {
            a2new = L;
        } else if (psi_h < psi_l - kAlphaEps) {
            a2new = H;
        } else {
            return false;
        }
    }
    if (std::abs(a2new - a2) <= kAlphaEps) return false;

    double a1new = a1 + sgn * (a2 - a2new);
    if (a1new < 0.0) {
        a1new = 0.0;
    } else if (a1new > C) {
        a1new = C;
    }

    double obj_before = 0.0;
    if (s.cfg.check_objective) obj_before = dual_objective(s);

    const double d1 = y1 * (a1new - a1);
    const double d2 = y2 * (a2new - a2);
    const double b1 = s.b - E1 - d1 * k11 - d2 * k12;
    const double b2 = s.b - E2 - d1 * k12 - d2 * k22;
    const bool a1_interior = a1new > kAlphaEps && a1new < C - kAlphaEps;
    const bool a2_interior = a2new > kAlphaEps && a2new < C - kAlphaEps;
    double bnew;
    if (a1_interior) {
        bnew = b1;
    } else if (a2_interior) {
        bnew = b2;
    } else {
        bnew = 0.5 * (b1 + b2);
    }

    s.alpha[i1] = a1new;
    s.alpha[i2] = a2new;
    simd::axpy2(d1, s.k.row(i1), d2, s.k.row(i2), s.err);
    const double db = bnew - s.b;
    for (double& e : s.err) e += db;
    s.b = bnew;
    ++s.pair_updates;

    if (s.cfg.check_objective) {
        const double obj_after = dual_objective(s);
        if (obj_after < obj_before - 1e-9) {
            throw NumericalError("smo: dual objective decreased from " +
                                 std::to_string(obj_before) + " to " +
                                 std::to_string(obj_after));
        }
    }
    return true;
}

struct SmoResult {
    std::vector<double> alpha;
    double b = 0.0;
    FitReport report;
};

SmoResult smo_solve(const Matrix& k, std::span<const int> y, const SvmConfig& cfg,
                    std::uint64_t seed) {
    const std::size_t n = y.size();
    SmoState s{k, y, cfg, {}, {}, 0.0, 0};
    s.alpha.assign(n, 0.0);
    s.err.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.err[i] = -static_cast<double>(y[i]);

    Rng rng(seed);
    const std::size_t max_updates = cfg.max_pair_updates_per_sample * n;
    std::size_t passes = 0;
    bool clean_pass = false;
    while (passes < cfg.max_passes && !clean_pass && s.pair_updates < max_updates) {
        std::size_t updated = 0;
        for (std::size_t i1 = 0; i1 < n && s.pair_updates < max_updates; ++i1) {
            const double r = s.err[i1] * static_cast<double>(y[i1]);
            const double a = s.alpha[i1];
            const bool violating = (r < -cfg.tol && a < cfg.C - kAlphaEps) ||
                                   (r > cfg.tol && a > kAlphaEps);
            if (!violating) continue;

            // Second choice: largest |E1 - E2| step estimate, lowest index
            // on ties; a seeded sweep picks up the cases the heuristic
            // cannot move.
            std::size_t best = i1;
            double best_gap = -1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i1) continue;
                const double gap = std::abs(s.err[i1] - s.err[j]);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = j;
                }
            }
            bool ok = best != i1 && try_step(s, i1, best);
            if (!ok) {
                const std::size_t start = rng.bounded(n);
                for (std::size_t t = 0; t < n && !ok; ++t) {
                    const std::size_t j = (start + t) % n;
                    if (j == i1 || j == best) continue;
                    ok = try_step(s, i1, j);
                }
            }
            if (ok) ++updated;
        }
        ++passes;
        clean_pass = updated == 0;
    }

    SmoResult out;
    out.report.pair_updates = s.pair_updates;
    out.report.passes = passes;

    // The incrementally tracked bias goes stale when every support vector
    // finishes at a bound (no pair step pins it down), so the final bias is
    // recomputed from alpha: the interior support vectors each demand
    // b = y_i - f0_i exactly, and without interior vectors any b inside
    // [b_lo, b_hi] is optimal; take the midpoint.
    std::vector<double> coef(n);
    for (std::size_t i = 0; i < n; ++i) coef[i] = s.alpha[i] * static_cast<double>(y[i]);
    std::vector<double> f0(n);
    for (std::size_t i = 0; i < n; ++i) f0[i] = simd::dot(coef, k.row(i));

    double interior_sum = 0.0;
    std::size_t interior_count = 0;
    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = s.alpha[i];
        const double pin = static_cast<double>(y[i]) - f0[i];
        if (a < kAlphaEps) {
            // Needs y_i (f0_i + b) >= 1.
            if (y[i] > 0) {
                b_lo = std::max(b_lo, pin);
            } else {
                b_hi = std::min(b_hi, pin);
            }
        } else if (a > cfg.C - kAlphaEps) {
            // Needs y_i (f0_i + b) <= 1.
            if (y[i] > 0) {
                b_hi = std::min(b_hi, pin);
            } else {
                b_lo = std::max(b_lo, pin);
            }
        } else {
            interior_sum += pin;
            ++interior_count;
        }
    }
    double b_final;
    if (interior_count > 0) {
        b_final = interior_sum / static_cast<double>(interior_count);
    } else if (std::isfinite(b_lo) && std::isfinite(b_hi)) {
        b_final = 0.5 * (b_lo + b_hi);
    } else if (std::isfinite(b_lo)) {
        b_final = b_lo;
    } else if (std::isfinite(b_hi)) {
        b_final = b_hi;
    } else {
        b_final = s.b;
    }

    // Judge KKT on freshly recomputed decision values, not the drifting
    // incremental cache.
    double max_viol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double margin = static_cast<double>(y[i]) * (f0[i] + b_final);
        const double a = s.alpha[i];
        double viol;
        if (a < kAlphaEps) {
            viol = std::max(0.0, 1.0 - margin);
        } else if (a > cfg.C - kAlphaEps) {
            viol = std::max(0.0, margin - 1.0);
        } else {
            viol = std::abs(margin - 1.0);
        }
        max_viol = std::max(max_viol, viol);
    }
    out.report.max_kkt_violation = max_viol;
    out.report.converged = max_viol <= cfg.tol;
    out.report.support_vector_count = static_cast<std::size_t>(
        std::count_if(s.alpha.begin(), s.alpha.end(),
                      [](double v) { return v > kSupportThreshold; }));
    out.alpha = std::move(s.alpha);
    out.b = b_final;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelMachine

KernelMachine::KernelMachine(KernelPtr kernel, SvmConfig config)
    : kernel_(std::move(kernel)), config_(config) {
    if (!kernel_) throw ParameterError("KernelMachine: null kernel");
    validate_config(config_);
}

KernelMachine::KernelMachine(SvmConfig config) : config_(config) { validate_config(config_); }

FitReport KernelMachine::fit_on_gram(const Matrix& k, std::span<const int> y,
                                     std::uint64_t seed) {
    SmoResult r = smo_solve(k, y, config_, seed);
    alpha_ = std::move(r.alpha);
    b_ = r.b;
    report_ = r.report;
    y_.assign(y.begin(), y.end());
    fitted_ = true;
    return report_;
}

FitReport KernelMachine::fit(SamplePtr x, std::span<const int> y, std::uint64_t seed) {
    if (!x) throw ParameterError("fit: null sample");
    if (!kernel_) {
        throw StateError("fit: this machine was built for precomputed Grams; use fit_precomputed");
    }
    if (y.size() != x->rows()) {
        throw DimensionError("fit: " + std::to_string(x->rows()) + " samplets but " +
                             std::to_string(y.size()) + " labels");
    }
    validate_labels(y);
    KernelMatrix km(kernel_);
    km.attach(x);
    const Matrix k = km.full(config_.gram_workers);
    FitReport rep = fit_on_gram(k, y, seed);
    train_ = std::move(x);
    return rep;
}

FitReport KernelMachine::fit(const Matrix& x, std::span<const int> y, std::uint64_t seed) {
    return fit(Sample::numeric_ptr(x), y, seed);
}

FitReport KernelMachine::fit_precomputed(const Matrix& k_train, std::span<const int> y,
                                         std::uint64_t seed) {
    if (k_train.rows() != k_train.cols()) {
        throw ShapeError("fit_precomputed: Gram matrix is " + std::to_string(k_train.rows()) +
                         "x" + std::to_string(k_train.cols()) + ", expected square");
    }
    if (y.size() != k_train.rows()) {
        throw DimensionError("fit_precomputed: Gram order " + std::to_string(k_train.rows()) +
                             " but " + std::to_string(y.size()) + " labels");
    }
    validate_labels(y);
    if (!k_train.is_symmetric(1e-12)) {
        throw ValidationError("fit_precomputed: Gram matrix is not symmetric to 1e-12 relative");
    }
    FitReport rep = fit_on_gram(k_train, y, seed);
    train_ = nullptr;
    return rep;
}

void KernelMachine::require_fitted() const {
    if (!fitted_) throw StateError("machine is not fitted");
}

std::vector<double> KernelMachine::decision_function(SamplePtr x_new) const {
    require_fitted();
    if (!train_) {
        throw StateError(
            "model was trained on a precomputed Gram; use decision_function_precomputed");
    }
    if (!x_new) throw ParameterError("decision_function: null sample");
    KernelMatrix km(kernel_);
    km.attach(train_, std::move(x_new));
    const std::size_t m = km.cols();
    std::vector<double> f(m, b_);
    // Only support-vector rows of the rectangular matrix are ever evaluated.
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        if (alpha_[i] <= kSupportThreshold) continue;
        const double coef = alpha_[i] * static_cast<double>(y_[i]);
        const std::vector<double> row = km.get_row(i);
        for (std::size_t j = 0; j < m; ++j) f[j] += coef * row[j];
    }
    return f;
}

std::vector<double> KernelMachine::decision_function(const Matrix& x_new) const {
    return decision_function(Sample::numeric_ptr(x_new));
}

std::vector<int> KernelMachine::predict(SamplePtr x_new) const {
    const std::vector<double> f = decision_function(std::move(x_new));
    std::vector<int> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] >= 0.0 ? 1 : -1;
    return out;
}

std::vector<int> KernelMachine::predict(const Matrix& x_new) const {
    return predict(Sample::numeric_ptr(x_new));
}

std::vector<double> KernelMachine::decision_function_precomputed(
    const Matrix& k_test_vs_train) const {
    require_fitted();
    if (k_test_vs_train.cols() != y_.size()) {
        throw ShapeError("decision_function_precomputed: " +
                         std::to_string(k_test_vs_train.cols()) + " columns but " +
                         std::to_string(y_.size()) + " training samplets");
    }
    std::vector<double> coef(y_.size(), 0.0);
    for (std::size_t i = 0; i < y_.size(); ++i) {
        if (alpha_[i] > kSupportThreshold) coef[i] = alpha_[i] * static_cast<double>(y_[i]);
    }
    std::vector<double> f(k_test_vs_train.rows());
    for (std::size_t r = 0; r < f.size(); ++r) {
        f[r] = simd::dot(coef, k_test_vs_train.row(r)) + b_;
    }
    return f;
}

std::vector<int> KernelMachine::predict_precomputed(const Matrix& k_test_vs_train) const {
    const std::vector<double> f = decision_function_precomputed(k_test_vs_train);
    std::vector<int> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] >= 0.0 ? 1 : -1;
    return out;
}

std::size_t KernelMachine::n_train() const {
    require_fitted();
    return y_.size();
}

const std::vector<double>& KernelMachine::alpha() const {
    require_fitted();
    return alpha_;
}

double KernelMachine::bias() const {
    require_fitted();
    return b_;
}

const std::vector<int>& KernelMachine::labels() const {
    require_fitted();
    return y_;
}

std::vector<std::size_t> KernelMachine::support_indices() const {
    require_fitted();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        if (alpha_[i] > kSupportThreshold) out.push_back(i);
    }
    return out;
}

const FitReport& KernelMachine::report() const {
    require_fitted();
    return report_;
}

std::string KernelMachine::to_json(int indent) const {
    require_fitted();
    nlohmann::ordered_json j;
    j["kernel"] = train_ ? kernel_->description() : "precomputed";
    j["C"] = config_.C;
    j["tol"] = config_.tol;
    j["alpha"] = alpha_;
    j["b"] = b_;
    const std::vector<std::size_t> sv = support_indices();
    j["support_indices"] = sv;
    std::vector<int> sv_labels;
    sv_labels.reserve(sv.size());
    for (std::size_t i : sv) sv_labels.push_back(y_[i]);
    j["support_labels"] = sv_labels;
    if (train_) {
        auto arr = nlohmann::ordered_json::array();
        for (std::size_t i : sv) {
            if (train_->kind() == InputKind::numeric) {
                const auto row = train_->numeric_row(i);
                arr.push_back(std::vector<double>(row.begin(), row.end()));
            } else {
                arr.push_back(train_->token_row(i));
            }
        }
        j["support_vectors"] = std::move(arr);
    } else {
        j["support_vectors"] = nullptr;
    }
    return j.dump(indent);
}

// ---------------------------------------------------------------------------
// fit_optimal

std::pair<KernelMachine, RankingReport> fit_optimal(KernelBucket& bucket, SamplePtr x,
                                                    std::span<const int> y, RankMethod method,
                                                    std::uint64_t seed, const SvmConfig& config,
                                                    std::size_t cv_folds) {
    if (bucket.size() == 0) throw ValidationError("fit_optimal: empty bucket");
    KernelSet& kset = bucket.set();
    if (!kset.has_shape()) {
        if (!x) throw ParameterError("fit_optimal: sample required for an unattached bucket");
        bucket.attach(x);
    }
    CvParams cv;
    cv.folds = cv_folds;
    cv.C = config.C;
    cv.seed = mix_seed(seed, 0xCF);
    const auto ranked = detail::rank_indices(kset, y, method, cv);
    RankingReport report = detail::make_report(kset, ranked, method);
    const auto [top_idx, top_score] = ranked.front();
    if (std::isnan(top_score)) {
        throw ValidationError("fit_optimal: no member produced a usable score");
    }

    KernelMatrixBase& top = kset.member(top_idx);
    auto* lazy = dynamic_cast<KernelMatrix*>(&top);
    if (lazy && x) {
        KernelMachine machine(lazy->kernel_ptr(), config);
        machine.fit(std::move(x), y, seed);
        return {std::move(machine), std::move(report)};
    }
    KernelMachine machine(config);
    machine.fit_precomputed(top.full(), y, seed);
    return {std::move(machine), std::move(report)};
}

}  // namespace kmx
