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

#include "kmx/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "kmx/errors.hpp"
#include "kmx/kernels.hpp"
#include "kmx/rng.hpp"
#include "kmx/sample.hpp"
#include "kmx/svm.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace kmx {

namespace {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::size_t clamped_train_count(double frac, std::size_t n_class) {
    if (n_class <= 1) return n_class;  // a singleton class trains whole
    const auto k =
        static_cast<std::size_t>(std::lround(frac * static_cast<double>(n_class)));
    return std::clamp<std::size_t>(k, 1, n_class - 1);
}

Split draw_split(std::span<const int> y, double frac, bool stratify, Rng& rng) {
    const std::size_t n = y.size();
    Split sp;
    if (stratify) {
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t i = 0; i < n; ++i) (y[i] == 1 ? pos : neg).push_back(i);
        rng.shuffle(pos);
        rng.shuffle(neg);
        for (const auto* cls : {&pos, &neg}) {
            const std::size_t k = clamped_train_count(frac, cls->size());
            sp.train.insert(sp.train.end(), cls->begin(), cls->begin() + k);
            sp.test.insert(sp.test.end(), cls->begin() + k, cls->end());
        }
    } else {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        const std::size_t k = clamped_train_count(frac, n);
        bool two_class = false;
        for (std::size_t attempt = 0; attempt < 100 && !two_class; ++attempt) {
            rng.shuffle(all);
            bool has_pos = false;
            bool has_neg = false;
            for (std::size_t i = 0; i < k; ++i) (y[all[i]] == 1 ? has_pos : has_neg) = true;
            two_class = has_pos && has_neg;
        }
        if (!two_class) {
            throw ValidationError("could not draw a two-class train split in 100 attempts");
        }
        sp.train.assign(all.begin(), all.begin() + k);
        sp.test.assign(all.begin() + k, all.end());
    }
    std::sort(sp.train.begin(), sp.train.end());
    std::sort(sp.test.begin(), sp.test.end());
    return sp;
}

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& ids) {
    Matrix out(ids.size(), src.cols());
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t j = 0; j < src.cols(); ++j) out(a, j) = src(ids[a], j);
    }
    return out;
}

double run_one_rep(const Dataset& ds, const ExperimentConfig& cfg, const KernelPtr& kernel,
                   std::size_t rep) {
    Rng rng(mix_seed(cfg.seed, rep));
    const Split sp = draw_split(ds.targets, cfg.train_frac, cfg.stratify, rng);
    const std::uint64_t fit_seed = rng.next_u64();
    if (sp.test.empty()) {
        throw ValidationError("repetition " + std::to_string(rep) + " left no test samplets");
    }
    auto [xtr, xte] = scale_features(gather_rows(ds.features, sp.train),
                                     gather_rows(ds.features, sp.test), cfg.scale);
    std::vector<int> ytr;
    ytr.reserve(sp.train.size());
    for (std::size_t i : sp.train) ytr.push_back(ds.targets[i]);

    SvmConfig scfg;
    scfg.C = cfg.C;
    KernelMachine machine(kernel, scfg);
    machine.fit(Sample::numeric_ptr(std::move(xtr)), ytr, fit_seed);
    const std::vector<int> pred = machine.predict(Sample::numeric_ptr(std::move(xte)));
    std::size_t correct = 0;
    for (std::size_t j = 0; j < sp.test.size(); ++j) {
        if (pred[j] == ds.targets[sp.test[j]]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(sp.test.size());
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::ordered_json result_json(const ExperimentResult& r) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["n"] = r.n;
    j["p"] = r.p;
    j["kernel"] = r.kernel;
    j["C"] = r.C;
    j["train_frac"] = r.train_frac;
    j["reps"] = r.reps;
    j["seed"] = r.seed;
    j["scale"] = r.scale;
    j["accuracies"] = r.accuracies;
    j["mean"] = r.mean;
    j["std"] = r.std_dev;
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

}  // namespace

ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (ds.n() < 10) {
        throw ValidationError("dataset '" + ds.name + "' has " + std::to_string(ds.n()) +
                              " rows; the harness needs at least 10");
    }
    if (ds.targets.size() != ds.n()) {
        throw DimensionError("dataset '" + ds.name + "': " + std::to_string(ds.n()) +
                             " feature rows but " + std::to_string(ds.targets.size()) +
                             " targets");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (int t : ds.targets) {
        if (t == 1) {
            has_pos = true;
        } else if (t == -1) {
            has_neg = true;
        } else {
            throw ValidationError("dataset '" + ds.name + "' holds target " +
                                  std::to_string(t) + "; targets must be -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("dataset '" + ds.name + "' holds a single class");
    }
    if (cfg.reps < 1) throw ParameterError("reps must be >= 1");
    if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) {
        throw ParameterError("train_frac must be in (0, 1)");
    }
    if (!(cfg.C > 0.0)) throw ParameterError("C must be > 0");
    if (cfg.workers < 1) throw ParameterError("workers must be >= 1");

    const KernelPtr kernel = parse_kernel_spec(cfg.kernel_spec);
    if (kernel->input_kind() != InputKind::numeric) {
        throw CompatibilityError("the harness needs a numeric kernel; '" + kernel->name() +
                                 "' consumes categorical tokens");
    }

    std::vector<double> accs(cfg.reps, 0.0);
    const std::size_t workers = std::min(cfg.workers, cfg.reps);
    if (workers <= 1) {
        for (std::size_t r = 0; r < cfg.reps; ++r) accs[r] = run_one_rep(ds, cfg, kernel, r);
    } else {
        // Round-robin repetition assignment; each repetition derives its own
        // RNG stream from (seed, r), so the outcome is schedule-independent.
        std::mutex err_mu;
        std::exception_ptr first_error;
        auto run_block = [&](std::size_t w) {
            for (std::size_t r = w; r < cfg.reps; r += workers) {
                try {
                    accs[r] = run_one_rep(ds, cfg, kernel, r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_block, w);
        run_block(0);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    double sum = 0.0;
    for (double a : accs) sum += a;
    const double mean = sum / static_cast<double>(cfg.reps);
    double sq = 0.0;
    for (double a : accs) sq += (a - mean) * (a - mean);
    const double sd = std::sqrt(sq / static_cast<double>(cfg.reps));

    ExperimentResult res;
    res.dataset = ds.name;
    res.n = ds.n();
    res.p = ds.p();
    res.kernel = kernel->description();
    res.C = cfg.C;
    res.train_frac = cfg.train_frac;
    res.reps = cfg.reps;
    res.seed = cfg.seed;
    res.scale = std::string(scale_mode_name(cfg.scale));
    res.accuracies = std::move(accs);
    res.mean = mean;
    res.std_dev = sd;
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::string ExperimentResult::to_json(int indent) const {
    return result_json(*this).dump(indent);
}

std::string ExperimentResult::to_csv() const {
    std::string out = "rep,accuracy\n";
    for (std::size_t i = 0; i < accuracies.size(); ++i) {
        out += std::to_string(i) + "," + format_g(accuracies[i]) + "\n";
    }
    out += "mean," + format_g(mean) + "\n";
    out += "std," + format_g(std_dev) + "\n";
    return out;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"SVM benchmark: repeated stratified holdout over a CSV dataset"};
    ExperimentConfig cfg;
    std::string data_path;
    std::string kernel_spec = cfg.kernel_spec;
    std::string scale_name = "minmax";
    bool no_stratify = false;
    std::string output;
    std::string format = "json";
    std::string dataset_name;
    bool has_header = false;
    std::int64_t label_column = -1;
    std::string positive_label;
    std::vector<double> sweep;
    std::uint64_t seed = 0;

    app.add_option("--data", data_path, "CSV dataset path")->required();
    app.add_option("--kernel", kernel_spec, "kernel spec, e.g. gaussian(sigma=0.1)")
        ->capture_default_str();
    app.add_option("--C", cfg.C, "SVM box constraint")->capture_default_str();
    app.add_option("--train-frac", cfg.train_frac, "training fraction per repetition")
        ->capture_default_str();
    app.add_option("--reps", cfg.reps, "holdout repetitions")->capture_default_str();
    app.add_option("--seed", seed, "master RNG seed")->required();
    app.add_option("--scale", scale_name, "feature scaling: none|minmax|zscore")
        ->capture_default_str();
    app.add_flag("--no-stratify", no_stratify, "plain shuffling instead of stratified splits");
    app.add_option("--workers", cfg.workers, "parallel repetitions")->capture_default_str();
    app.add_option("--output", output, "write the report here instead of stdout");
    app.add_option("--format", format, "report format: json|csv")->capture_default_str();
    app.add_option("--name", dataset_name, "dataset name override for the report");
    app.add_flag("--has-header", has_header, "skip the first line of the CSV");
    auto* label_col_opt =
        app.add_option("--label-column", label_column, "0-based label column (default: last)");
    app.add_option("--positive-label", positive_label, "label token mapped to +1");
    app.add_option("--sweep-sigma", sweep,
                   "comma-separated sigmas; runs the gaussian kernel once per sigma and "
                   "reports a JSON array")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.kernel_spec = kernel_spec;
    cfg.seed = seed;
    cfg.stratify = !no_stratify;

    try {
        cfg.scale = parse_scale_mode(scale_name);
        if (format != "json" && format != "csv") {
            throw ParseError("unknown format '" + format + "'; valid formats: json, csv");
        }
        const KernelPtr kernel = parse_kernel_spec(kernel_spec);
        if (!sweep.empty()) {
            if (kernel->name() != "gaussian") {
                throw ParseError("--sweep-sigma applies to the gaussian kernel, got '" +
                                 kernel->name() + "'");
            }
            if (format == "csv") {
                throw ParseError("--sweep-sigma reports a JSON array; csv format is not "
                                 "available with it");
            }
            for (double s : sweep) {
                if (!(s > 0.0)) throw ParameterError("--sweep-sigma values must be > 0");
            }
        }
        if (cfg.reps < 1) throw ParameterError("--reps must be >= 1");
        if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) {
            throw ParameterError("--train-frac must be in (0, 1)");
        }
        if (!(cfg.C > 0.0)) throw ParameterError("--C must be > 0");
        if (cfg.workers < 1) throw ParameterError("--workers must be >= 1");
        if (label_col_opt->count() > 0 && label_column < 0) {
            throw ParameterError("--label-column must be >= 0");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        LoadOptions lo;
        lo.has_header = has_header;
        if (label_col_opt->count() > 0) {
            lo.label_column = static_cast<std::size_t>(label_column);
        }
        if (!positive_label.empty()) lo.positive_label = positive_label;
        Dataset ds = load_csv(data_path, lo);
        if (!dataset_name.empty()) ds.name = dataset_name;

        std::string report;
        if (sweep.empty()) {
            const ExperimentResult res = run_experiment(ds, cfg);
            report = format == "json" ? res.to_json() : res.to_csv();
        } else {
            auto arr = nlohmann::ordered_json::array();
            for (double s : sweep) {
                ExperimentConfig c = cfg;
                c.kernel_spec = "gaussian(sigma=" + format_param_value(s) + ")";
                arr.push_back(result_json(run_experiment(ds, c)));
            }
            report = arr.dump(2);
        }
        if (!output.empty()) {
            std::ofstream out(output);
            if (!out) throw ParseError("cannot write '" + output + "'");
            out << report << "\n";
        } else {
            std::cout << report << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace kmx
