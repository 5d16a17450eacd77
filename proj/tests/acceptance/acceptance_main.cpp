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
//
// Release gate: one criterion per invocation (A1..A8), one PASS/FAIL/SKIP
// line on stdout, exit 0 on PASS or SKIP and 1 on FAIL. Tolerances are
// pinned below; loosening one to get a criterion green is not acceptable.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kmx/dataset.hpp"
#include "kmx/errors.hpp"
#include "kmx/evaluate.hpp"
#include "kmx/kernel_matrix.hpp"
#include "kmx/kernel_set.hpp"
#include "kmx/kernels.hpp"
#include "kmx/matrix.hpp"
#include "kmx/ops.hpp"
#include "kmx/rng.hpp"
#include "kmx/sample.hpp"
#include "kmx/svm.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace kmx;

namespace {

// --- pinned tolerances -----------------------------------------------------

constexpr double kA1MeanAbsTol = 0.05;       // accuracy distance to reference means
constexpr double kA3RelTol = 1e-8;           // PSD admission threshold
constexpr double kA3FixtureEigTol = 1e-9;    // eigenvalues of the 2x2 fixture
constexpr double kA5SmoTol = 1e-6;           // solver KKT tolerance
constexpr std::size_t kA5MaxPasses = 10000;
constexpr std::size_t kA5UpdateBudget = 10000;  // pair updates per samplet
constexpr double kA5ObjRelTol = 1e-4;        // objective gap vs oracle, relative
constexpr double kA5FeasFactor = 1e-8;       // |sum alpha_i y_i| <= factor*C*n
constexpr double kA5BoxSlack = 1e-15;        // box constraint slack
constexpr double kA5AgreeTol = 1e-10;        // fit vs fit_precomputed on (alpha, b)
constexpr double kA6RowSumFactor = 1e-9;     // centered row sums <= factor*n*max|K|
constexpr double kA6IdempotenceTol = 1e-10;  // double centering drift
constexpr double kA6NormalizeTol = 1e-12;    // double normalization drift
constexpr double kA6AlignTol = 1e-12;        // self alignment and scale invariance
constexpr double kA7AlignTol = 1e-12;        // ideal kernel alignment score
constexpr double kA7MinAccuracy = 0.95;      // selected machine on two blobs

struct Outcome {
    bool pass = true;
    bool skip = false;
    std::string detail;
};

Outcome fail(std::string detail) { return {false, false, std::move(detail)}; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
        }
    }
    return m;
}

// --- A1: benchmark reproduction -------------------------------------------

struct ReferenceRun {
    const char* dataset;
    double mean;
};

// Reference mean accuracies for the bundled UCI benchmark configuration
// (C=1, 80/20 split, 20 stratified repetitions, gaussian kernel).
constexpr ReferenceRun kA1References[] = {
    {"ionosphere", 0.9451},
    {"heart", 0.8037},
    {"breast-cancer", 0.9704},
    {"german", 0.7282},
};

Outcome run_a1(const fs::path& data_dir) {
    std::vector<std::string> missing;
    for (const ReferenceRun& ref : kA1References) {
        if (!fs::exists(data_dir / (std::string(ref.dataset) + ".csv"))) {
            missing.push_back(ref.dataset);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const std::string& m : missing) {
            if (!list.empty()) list += ", ";
            list += m;
        }
        return {true, true,
                "datasets not found under '" + data_dir.string() + "': " + list +
                    "; run scripts/fetch_uci_data.sh and re-run"};
    }

    const ScaleMode scales[] = {ScaleMode::minmax, ScaleMode::zscore};
    const double sigmas[] = {0.1, 0.5, 1.0, 2.0};
    std::string matched;
    for (const ReferenceRun& ref : kA1References) {
        const Dataset ds = load_csv(data_dir / (std::string(ref.dataset) + ".csv"));
        double best_gap = 1.0;
        std::string best_desc;
        bool hit = false;
        for (ScaleMode scale : scales) {
            for (double sigma : sigmas) {
                ExperimentConfig cfg;
                cfg.kernel_spec = "gaussian(sigma=" + fmt(sigma) + ")";
                cfg.C = 1.0;
                cfg.train_frac = 0.8;
                cfg.reps = 20;
                cfg.seed = 0;
                cfg.scale = scale;
                cfg.stratify = true;
                const ExperimentResult res = run_experiment(ds, cfg);
                const double gap = std::abs(res.mean - ref.mean);
                if (gap < best_gap) {
                    best_gap = gap;
                    best_desc = std::string(ref.dataset) + ": " +
                                std::string(scale_mode_name(scale)) +
                                " sigma=" + fmt(sigma) + " mean=" + fmt(res.mean);
                }
                hit = hit || gap <= kA1MeanAbsTol;
            }
        }
        if (!hit) {
            return fail(std::string(ref.dataset) + " never came within " +
                        fmt(kA1MeanAbsTol) + " of " + fmt(ref.mean) + "; closest " +
                        best_desc);
        }
        if (!matched.empty()) matched += "; ";
        matched += best_desc;
    }
    return {true, false, matched};
}

// --- A2: oracle equivalence ------------------------------------------------

std::shared_ptr<const Sample> random_numeric_sample(Rng& rng, std::size_t n,
                                                    std::size_t p) {
    Matrix x(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.next_in(0.0, 1.0);
    }
    return Sample::numeric_ptr(std::move(x));
}

std::shared_ptr<const Sample> random_token_sample(Rng& rng, std::size_t n,
                                                  std::size_t width) {
    static const std::vector<std::string> alphabet{"a", "b", "c", "d"};
    std::vector<std::vector<std::string>> rows(n);
    for (auto& row : rows) {
        row.reserve(width);
        for (std::size_t j = 0; j < width; ++j) {
            row.push_back(alphabet[rng.bounded(alphabet.size())]);
        }
    }
    return Sample::categorical_ptr(std::move(rows));
}

Outcome run_a2() {
    const std::size_t worker_counts[] = {1, 2, 4, 8};
    std::size_t checked = 0;
    for (const std::string& name : registered_kernel_names()) {
        const KernelPtr kernel = parse_kernel_spec(name);
        Rng rng(0x5eed + checked);
        for (std::size_t trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + rng.bounded(50);
            const std::size_t m = 1 + rng.bounded(50);
            const bool tokens = kernel->input_kind() == InputKind::categorical;
            const std::size_t p = 1 + rng.bounded(8);
            const auto one = tokens ? random_token_sample(rng, n, p)
                                    : random_numeric_sample(rng, n, p);
            const auto two = tokens ? random_token_sample(rng, m, p)
                                    : random_numeric_sample(rng, m, p);

            const Matrix square_oracle = testing::brute_force_gram(*kernel, *one);
            const Matrix rect_oracle = testing::brute_force_gram(*kernel, *one, two.get());
            for (std::size_t workers : worker_counts) {
                KernelMatrix square(kernel);
                square.attach(one);
                if (!(square.full(workers) == square_oracle)) {
                    return fail(name + " trial " + std::to_string(trial) + ": square " +
                                std::to_string(n) + "x" + std::to_string(n) +
                                " differs from the oracle at workers=" +
                                std::to_string(workers));
                }
                KernelMatrix rect(kernel);
                rect.attach(one, two);
                if (!(rect.full(workers) == rect_oracle)) {
                    return fail(name + " trial " + std::to_string(trial) + ": rect " +
                                std::to_string(n) + "x" + std::to_string(m) +
                                " differs from the oracle at workers=" +
                                std::to_string(workers));
                }
            }
            ++checked;
        }
    }
    return {true, false,
            std::to_string(checked) +
                " kernel/sample draws bit-identical to the brute-force oracle "
                "across worker counts {1,2,4,8}"};
}

// --- A3: PSD admission -----------------------------------------------------

Outcome run_a3() {
    for (const std::string& name : registered_kernel_names()) {
        const KernelPtr kernel = parse_kernel_spec(name);
        const bool tokens = kernel->input_kind() == InputKind::categorical;
        Rng rng(0xdecade ^ std::hash<std::string>{}(name));
        for (std::size_t trial = 0; trial < 10; ++trial) {
            const std::size_t p = 2 + rng.bounded(6);
            const auto sample = tokens ? random_token_sample(rng, 30, p)
                                       : random_numeric_sample(rng, 30, p);
            const PsdReport report = validate_psd(*kernel, *sample, kA3RelTol);
            if (!report.pass) {
                return fail(name + " trial " + std::to_string(trial) +
                            ": min eigenvalue " + fmt(report.min_eigenvalue) +
                            " rejected (" + report.message + ")");
            }
        }
    }

    const Matrix fixture = Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}});
    const PsdReport report = validate_psd(fixture, kA3RelTol);
    if (report.pass) return fail("the indefinite 2x2 fixture was accepted");
    if (!report.symmetric) return fail("the 2x2 fixture should test as symmetric");
    if (std::abs(report.min_eigenvalue - (-1.0)) > kA3FixtureEigTol) {
        return fail("fixture min eigenvalue " + fmt(report.min_eigenvalue) +
                    " is not -1 within " + fmt(kA3FixtureEigTol));
    }
    return {true, false,
            "6 kernels x 10 samples admitted at rel_tol=1e-8; indefinite fixture "
            "rejected with min eigenvalue " +
                fmt(report.min_eigenvalue)};
}

// --- A4: lazy evaluation economy ------------------------------------------

class CountingKernel final : public KernelFunction {
  public:
    CountingKernel() : KernelFunction("counting", {}) {}

    double compute(std::span<const double> x, std::span<const double> y) const override {
        ++evaluations;
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
        return dot;
    }

    mutable std::atomic<std::size_t> evaluations{0};
};

Outcome run_a4() {
    constexpr std::size_t kN = 20;
    for (std::size_t script = 0; script < 50; ++script) {
        Rng rng(0xacce55 + script);
        const auto kernel = std::make_shared<CountingKernel>();
        KernelMatrix km(kernel);
        km.attach(random_numeric_sample(rng, kN, 3));

        std::set<std::pair<std::size_t, std::size_t>> touched;
        auto canon = [&touched](std::size_t i, std::size_t j) {
            touched.insert({std::min(i, j), std::max(i, j)});
        };

        struct Op {
            int kind;
            std::size_t i;
            std::size_t j;
            std::vector<std::size_t> rows;
            std::vector<std::size_t> cols;
        };
        std::vector<Op> ops;
        for (std::size_t step = 0; step < 30; ++step) {
            Op op;
            op.kind = static_cast<int>(rng.bounded(3));
            op.i = rng.bounded(kN);
            op.j = rng.bounded(kN);
            if (op.kind == 2) {
                for (std::size_t r = 0; r < 1 + rng.bounded(5); ++r) {
                    op.rows.push_back(rng.bounded(kN));
                }
                for (std::size_t c = 0; c < 1 + rng.bounded(5); ++c) {
                    op.cols.push_back(rng.bounded(kN));
                }
            }
            ops.push_back(std::move(op));
        }

        auto replay = [&](const Op& op) {
            switch (op.kind) {
                case 0:
                    km.get_element(op.i, op.j);
                    canon(op.i, op.j);
                    break;
                case 1:
                    km.get_row(op.i);
                    for (std::size_t j = 0; j < kN; ++j) canon(op.i, j);
                    break;
                default:
                    km.get_submatrix(op.rows, op.cols);
                    for (std::size_t r : op.rows) {
                        for (std::size_t c : op.cols) canon(r, c);
                    }
            }
        };

        for (const Op& op : ops) {
            replay(op);
            if (kernel->evaluations != touched.size()) {
                return fail("script " + std::to_string(script) + ": " +
                            std::to_string(kernel->evaluations.load()) +
                            " evaluations after touching " +
                            std::to_string(touched.size()) + " distinct pairs");
            }
        }
        const std::size_t before = kernel->evaluations;
        for (const Op& op : ops) replay(op);
        if (kernel->evaluations != before) {
            return fail("script " + std::to_string(script) + ": replay added " +
                        std::to_string(kernel->evaluations - before) + " evaluations");
        }
    }
    return {true, false,
            "50 access scripts on 20x20: evaluation count == distinct canonical "
            "pairs, replays add zero"};
}

// --- A5: SMO vs projected-gradient oracle ----------------------------------

Outcome run_a5() {
    std::size_t converged_count = 0;
    for (std::size_t problem = 0; problem < 30; ++problem) {
        Rng rng(0x50f7 + 31 * problem);
        const std::size_t n = 2 + rng.bounded(11);
        const std::size_t p = 1 + rng.bounded(4);
        const double c = problem % 2 == 0 ? 1.0 : 10.0;
        Matrix x(n, p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.next_in(-1.0, 1.0);
        }
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = rng.bounded(2) == 0 ? -1 : 1;
        y[0] = 1;
        y[1] = -1;  // both classes present

        const KernelPtr kernel = parse_kernel_spec("linear");
        const Matrix k = testing::brute_force_gram(*kernel, Sample::numeric(x));

        SvmConfig cfg;
        cfg.C = c;
        cfg.tol = kA5SmoTol;
        cfg.max_passes = kA5MaxPasses;
        cfg.max_pair_updates_per_sample = kA5UpdateBudget;
        KernelMachine machine(kernel, cfg);
        const std::uint64_t seed = 0xf17 + problem;
        machine.fit(Sample::numeric_ptr(x), y, seed);
        const std::vector<double>& alpha = machine.alpha();
        const double b = machine.bias();

        // Box and equality feasibility.
        double balance = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] < -kA5BoxSlack || alpha[i] > c + kA5BoxSlack) {
                return fail("problem " + std::to_string(problem) + ": alpha[" +
                            std::to_string(i) + "]=" + fmt(alpha[i]) +
                            " leaves [0, C]");
            }
            balance += alpha[i] * y[i];
        }
        if (std::abs(balance) > kA5FeasFactor * c * static_cast<double>(n)) {
            return fail("problem " + std::to_string(problem) + ": |sum alpha_i y_i|=" +
                        fmt(std::abs(balance)) + " breaks the equality constraint");
        }

        // Objective gap against the independent solver.
        const testing::QpSolution oracle = testing::reference_dual_solver(k, y, c);
        const double w_smo = testing::dual_objective(k, y, alpha);
        const double gap = std::abs(w_smo - oracle.objective);
        if (gap > kA5ObjRelTol * std::max(1.0, std::abs(oracle.objective))) {
            return fail("problem " + std::to_string(problem) + ": objective " +
                        fmt(w_smo) + " vs oracle " + fmt(oracle.objective) +
                        " (gap " + fmt(gap) + ")");
        }

        // KKT residuals recomputed from scratch on converged fits.
        if (machine.report().converged) {
            ++converged_count;
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double f = b;
                for (std::size_t j = 0; j < n; ++j) f += alpha[j] * y[j] * k(j, i);
                const double margin = y[i] * f;
                double viol = 0.0;
                if (alpha[i] <= 1e-12) {
                    viol = std::max(0.0, 1.0 - margin);
                } else if (alpha[i] >= c - 1e-12) {
                    viol = std::max(0.0, margin - 1.0);
                } else {
                    viol = std::abs(margin - 1.0);
                }
                worst = std::max(worst, viol);
            }
            if (worst > kA5SmoTol * 1.01 + 1e-12) {
                return fail("problem " + std::to_string(problem) +
                            ": recomputed KKT violation " + fmt(worst) +
                            " exceeds tol " + fmt(kA5SmoTol));
            }
        }

        // Same problem through the precomputed entry point.
        KernelMachine twin(cfg);
        twin.fit_precomputed(k, y, seed);
        double worst_alpha = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst_alpha = std::max(worst_alpha, std::abs(alpha[i] - twin.alpha()[i]));
        }
        if (worst_alpha > kA5AgreeTol || std::abs(b - twin.bias()) > kA5AgreeTol) {
            return fail("problem " + std::to_string(problem) +
                        ": fit and fit_precomputed disagree (max dalpha " +
                        fmt(worst_alpha) + ", db " + fmt(std::abs(b - twin.bias())) +
                        ")");
        }
    }
    return {true, false,
            "30 problems within 1e-4 of the projected-gradient optimum; " +
                std::to_string(converged_count) +
                "/30 converged with independently verified KKT residuals"};
}

// --- A6: operation identities ----------------------------------------------

Outcome run_a6() {
    for (std::size_t trial = 0; trial < 10; ++trial) {
        Rng rng(0x0b5 + trial);
        const std::size_t n = 5 + rng.bounded(16);
        const Matrix k = testing::random_psd(n, 0xab0 + trial);
        const Matrix k2 = testing::random_psd(n, 0xcd0 + trial);

        const Matrix centered = center_gram(k);
        const double row_bound =
            kA6RowSumFactor * static_cast<double>(n) * k.max_abs();
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) sum += centered(i, j);
            if (std::abs(sum) > row_bound) {
                return fail("trial " + std::to_string(trial) + ": centered row " +
                            std::to_string(i) + " sums to " + fmt(sum));
            }
        }
        if (max_abs_diff(center_gram(centered), centered) > kA6IdempotenceTol) {
            return fail("trial " + std::to_string(trial) + ": centering is not idempotent");
        }

        const Matrix normalized = normalize_gram(k);
        for (std::size_t i = 0; i < n; ++i) {
            if (normalized(i, i) != 1.0) {
                return fail("trial " + std::to_string(trial) + ": normalized diag[" +
                            std::to_string(i) + "]=" + fmt(normalized(i, i)));
            }
        }
        if (max_abs_diff(normalize_gram(normalized), normalized) > kA6NormalizeTol) {
            return fail("trial " + std::to_string(trial) +
                        ": double normalization drifts");
        }

        for (bool center : {true, false}) {
            if (std::abs(alignment(k, k, center) - 1.0) > kA6AlignTol) {
                return fail("trial " + std::to_string(trial) + ": alignment(K,K)=" +
                            fmt(alignment(k, k, center)) +
                            (center ? " centered" : " uncentered"));
            }
            for (double scale : {0.5, 3.0}) {
                Matrix scaled = k;
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= scale;
                }
                if (std::abs(alignment(scaled, k2, center) - alignment(k, k2, center)) >
                    kA6AlignTol) {
                    return fail("trial " + std::to_string(trial) +
                                ": alignment is not scale invariant at " + fmt(scale));
                }
            }
        }

        if (!validate_psd(hadamard_product(k, k2), kA3RelTol).pass) {
            return fail("trial " + std::to_string(trial) +
                        ": Hadamard product left the PSD cone");
        }
        const Matrix ks[] = {k, k2};
        const double ws[] = {0.7, 2.3};
        if (!validate_psd(linear_combination(ks, ws), kA3RelTol).pass) {
            return fail("trial " + std::to_string(trial) +
                        ": nonnegative combination left the PSD cone");
        }
    }
    return {true, false,
            "10 random PSD trials: centering/normalization/alignment identities and "
            "PSD closure all hold"};
}

// --- A7: selection sanity --------------------------------------------------

Outcome run_a7() {
    // Part 1: a bucket holding the ideal target kernel must rank it first.
    auto [x, y] = testing::two_blobs(24, 0xb10b);
    {
        KernelBucket bucket{GridSpec{}};
        auto ideal =
            std::make_shared<PrecomputedKernelMatrix>(target_matrix(y), true);
        ideal->set_name("ideal");
        bucket.set().add(ideal);
        auto noise = std::make_shared<PrecomputedKernelMatrix>(
            testing::random_psd(24, 0x715e), true);
        noise->set_name("noise");
        bucket.set().add(noise);
        bucket.set().add(std::make_shared<ConstantKernelMatrix>(1.0, 24, 24));

        auto [machine, report] =
            fit_optimal(bucket, nullptr, y, RankMethod::alignment, 0x7e57);
        if (report.ranking.empty() || report.ranking[0].name != "ideal") {
            return fail("ideal kernel was not ranked first (got '" +
                        (report.ranking.empty() ? "?" : report.ranking[0].name) + "')");
        }
        if (std::abs(report.ranking[0].score - 1.0) > kA7AlignTol) {
            return fail("ideal kernel alignment " + fmt(report.ranking[0].score) +
                        " is not 1 within 1e-12");
        }
        const std::vector<int> pred = machine.predict_precomputed(target_matrix(y));
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (pred[i] != y[i]) {
                return fail("machine fitted on the ideal kernel mislabels samplet " +
                            std::to_string(i));
            }
        }
    }

    // Part 2: the default grid on separable blobs.
    KernelBucket bucket{KernelBucket::default_grid()};
    const auto sample = Sample::numeric_ptr(x);
    auto [machine, report] =
        fit_optimal(bucket, sample, y, RankMethod::alignment, 0x7e58);
    const std::vector<int> pred = machine.predict(sample);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (pred[i] == y[i]) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(y.size());
    if (accuracy < kA7MinAccuracy) {
        return fail("default grid pick '" + report.ranking[0].name +
                    "' trains at accuracy " + fmt(accuracy));
    }
    return {true, false,
            "ideal kernel ranked first at alignment 1.0; default grid pick '" +
                report.ranking[0].name + "' trains at accuracy " + fmt(accuracy)};
}

// --- A8: byte determinism of the harness -----------------------------------

std::string accuracies_slice(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const std::size_t at = text.find("\"accuracies\"");
    const std::size_t end = text.find(']', at);
    if (at == std::string::npos || end == std::string::npos) return "<missing>";
    return text.substr(at, end - at + 1);
}

Outcome run_a8() {
    const fs::path dir = fs::temp_directory_path();
    const fs::path data = dir / "kmx_acceptance_blobs.csv";
    {
        auto [x, y] = testing::two_blobs(30, 0xa8);
        std::ofstream out(data);
        char buf[96];
        for (std::size_t i = 0; i < 30; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", x(i, 0), x(i, 1),
                          y[i] == 1 ? "pos" : "neg");
            out << buf;
        }
    }
    const fs::path out1 = dir / "kmx_acceptance_run1.json";
    const fs::path out2 = dir / "kmx_acceptance_run2.json";
    auto invoke = [&](const fs::path& out) {
        std::vector<std::string> storage{"kmx-bench",  "--data",  data.string(),
                                         "--seed",     "123",     "--reps",
                                         "5",          "--output", out.string()};
        std::vector<char*> argv;
        for (std::string& s : storage) argv.push_back(s.data());
        return cli_main(static_cast<int>(argv.size()), argv.data());
    };
    const int rc1 = invoke(out1);
    const int rc2 = invoke(out2);
    Outcome outcome;
    if (rc1 != 0 || rc2 != 0) {
        outcome = fail("harness exited with " + std::to_string(rc1) + " and " +
                       std::to_string(rc2));
    } else {
        const std::string s1 = accuracies_slice(out1);
        const std::string s2 = accuracies_slice(out2);
        if (s1 != s2 || s1 == "<missing>") {
            outcome = fail("accuracies arrays differ between identical invocations");
        } else {
            std::string compact;
            for (char c : s1) {
                if (c != '\n' && c != ' ') compact += c;
            }
            outcome = {true, false, "repeated invocation reproduced " + compact};
        }
    }
    fs::remove(data);
    fs::remove(out1);
    fs::remove(out2);
    return outcome;
}

}  // namespace

int main(int argc, char** argv) {
    std::string criterion;
    fs::path data_dir = "data/uci";
    if (const char* env = std::getenv("KMX_UCI_DIR")) data_dir = env;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--data-dir" && i + 1 < argc) {
            data_dir = argv[++i];
        } else if (!arg.empty() && arg[0] != '-') {
            criterion = arg;
        }
    }
    if (criterion.empty()) {
        std::cerr << "usage: kmx-acceptance <A1..A8> [--data-dir <path>]\n";
        return 2;
    }

    Outcome outcome;
    if (criterion == "A1") {
        outcome = run_a1(data_dir);
    } else if (criterion == "A2") {
        outcome = run_a2();
    } else if (criterion == "A3") {
        outcome = run_a3();
    } else if (criterion == "A4") {
        outcome = run_a4();
    } else if (criterion == "A5") {
        outcome = run_a5();
    } else if (criterion == "A6") {
        outcome = run_a6();
    } else if (criterion == "A7") {
        outcome = run_a7();
    } else if (criterion == "A8") {
        outcome = run_a8();
    } else {
        std::cerr << "unknown criterion '" << criterion << "'\n";
        return 2;
    }

    const char* verdict = outcome.skip ? "SKIP" : (outcome.pass ? "PASS" : "FAIL");
    std::cout << criterion << ": " << verdict << " (" << outcome.detail << ")\n";
    return outcome.pass || outcome.skip ? 0 : 1;
}
