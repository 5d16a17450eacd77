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
#include <cstdint>
#include <string>
#include <vector>

#include "kmx/dataset.hpp"

namespace kmx {

// Repeated stratified holdout: per repetition r the split is drawn from a
// stream derived from (seed, r), so results are independent of worker
// scheduling and identical across runs.
struct ExperimentConfig {
    std::string kernel_spec = "gaussian(sigma=0.1)";
    double C = 1.0;
    double train_frac = 0.8;
    std::size_t reps = 20;
    std::uint64_t seed = 0;
    ScaleMode scale = ScaleMode::minmax;
    bool stratify = true;
    std::size_t workers = 1;
};

struct ExperimentResult {
    std::string dataset;
    std::size_t n = 0;
    std::size_t p = 0;
    std::string kernel;  // canonical kernel description
    double C = 1.0;
    double train_frac = 0.8;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::string scale;
    std::vector<double> accuracies;  // one per repetition, each in [0, 1]
    double mean = 0.0;
    double std_dev = 0.0;  // population formula (divide by reps)
    double wall_time_s = 0.0;

    // {"dataset":..., "n":..., "p":..., "kernel":..., "C":...,
    //  "train_frac":..., "reps":..., "seed":..., "scale":...,
    //  "accuracies":[...], "mean":..., "std":..., "wall_time_s":...}
    std::string to_json(int indent = 2) const;
    // rep,accuracy rows followed by mean and std rows.
    std::string to_csv() const;
};

ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg);

// Benchmark CLI. Exit codes: 0 success, 2 flag/configuration errors,
// 3 data or experiment errors.
int cli_main(int argc, char** argv);

}  // namespace kmx
