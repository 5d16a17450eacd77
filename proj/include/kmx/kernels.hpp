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

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kmx/sample.hpp"

namespace kmx {

/// Formats a parameter value the way descriptions and spec strings print it:
/// shortest round-trip decimal, with ".0" appended to integral values
/// (1 -> "1.0", 0.1 -> "0.1").
std::string format_param_value(double value);

/// A named, parameterized similarity function over two samplets.
///
/// Immutable after construction and free of internal state, so one instance
/// may be shared and evaluated from any number of threads. Evaluation is a
/// pure function of (params, x, y) and symmetric in x and y; within one
/// process repeated evaluations are bit-identical.
class KernelFunction {
public:
    virtual ~KernelFunction() = default;
    KernelFunction(const KernelFunction&) = delete;
    KernelFunction& operator=(const KernelFunction&) = delete;

    const std::string& name() const { return name_; }
    const std::vector<std::pair<std::string, double>>& params() const { return params_; }
    /// Parameter values in display form; MatchKernel overrides to print
    /// perc=true/false.
    virtual std::vector<std::pair<std::string, std::string>> param_strings() const;
    /// "name(param=value,...)", e.g. "chi2(gamma=1.0)". Parseable back via
    /// parse_kernel_spec.
    std::string description() const;

    virtual InputKind input_kind() const { return InputKind::numeric; }

    /// Checked evaluation: validate_pair then compute.
    double operator()(std::span<const double> x, std::span<const double> y) const;
    double operator()(const std::vector<std::string>& x, const std::vector<std::string>& y) const;

    /// Per-call input checks behind the checked operator(): input kind,
    /// equal lengths, finite entries, plus kernel-specific domain rules.
    virtual void validate_pair(std::span<const double> x, std::span<const double> y) const;
    virtual void validate_pair(const std::vector<std::string>& x,
                               const std::vector<std::string>& y) const;

    /// Raw evaluation, no input checks. Callers are expected to have
    /// validated the data once up front (see validate_sample).
    virtual double compute(std::span<const double> x, std::span<const double> y) const;
    virtual double compute(const std::vector<std::string>& x,
                           const std::vector<std::string>& y) const;

    /// Verifies a whole sample is usable with this kernel (input kind,
    /// kernel-specific domain rules), so per-element checks can be skipped.
    virtual void validate_sample(const Sample& sample) const;

protected:
    KernelFunction(std::string name, std::vector<std::pair<std::string, double>> params);

private:
    std::string name_;
    std::vector<std::pair<std::string, double>> params_;
};

using KernelPtr = std::shared_ptr<const KernelFunction>;

/// K(x,y) = <x,y>
class LinearKernel final : public KernelFunction {
public:
    LinearKernel();
    double compute(std::span<const double> x, std::span<const double> y) const override;
};

/// K(x,y) = (gamma*<x,y> + coef0)^degree
class PolynomialKernel final : public KernelFunction {
public:
    explicit PolynomialKernel(double gamma = 1.0, int degree = 3, double coef0 = 1.0);
    /// degree prints as an integer.
    std::vector<std::pair<std::string, std::string>> param_strings() const override;
    double compute(std::span<const double> x, std::span<const double> y) const override;

private:
    double gamma_;
    int degree_;
    double coef0_;
};

/// K(x,y) = exp(-||x-y||^2 / (2*sigma^2))
class GaussianKernel final : public KernelFunction {
public:
    explicit GaussianKernel(double sigma = 1.0);
    double compute(std::span<const double> x, std::span<const double> y) const override;

private:
    double neg_inv_two_sigma_sq_;
};

/// K(x,y) = exp(-gamma * ||x-y||_1)
class LaplacianKernel final : public KernelFunction {
public:
    explicit LaplacianKernel(double gamma = 1.0);
    double compute(std::span<const double> x, std::span<const double> y) const override;

private:
    double gamma_;
};

/// K(x,y) = exp(-gamma * sum_i (x_i-y_i)^2/(x_i+y_i)) over nonnegative
/// vectors; coordinates with x_i + y_i == 0 contribute zero.
class Chi2Kernel final : public KernelFunction {
public:
    explicit Chi2Kernel(double gamma = 1.0);
    double compute(std::span<const double> x, std::span<const double> y) const override;
    void validate_pair(std::span<const double> x, std::span<const double> y) const override;
    void validate_sample(const Sample& sample) const override;

private:
    double gamma_;
};

/// Count (or fraction, with perc) of positions where two token vectors agree.
class MatchKernel final : public KernelFunction {
public:
    explicit MatchKernel(bool return_perc = false);
    InputKind input_kind() const override { return InputKind::categorical; }
    std::vector<std::pair<std::string, std::string>> param_strings() const override;
    double compute(const std::vector<std::string>& x,
                   const std::vector<std::string>& y) const override;
    void validate_pair(const std::vector<std::string>& x,
                       const std::vector<std::string>& y) const override;
    void validate_sample(const Sample& sample) const override;
    bool return_perc() const { return return_perc_; }

private:
    bool return_perc_;
};

/// Instrumentation decorator: forwards to an inner kernel and counts raw
/// evaluations. The counter is observability only; results are untouched.
class CountingKernel final : public KernelFunction {
public:
    explicit CountingKernel(KernelPtr inner);

    std::uint64_t evaluations() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

    InputKind input_kind() const override { return inner_->input_kind(); }
    std::vector<std::pair<std::string, std::string>> param_strings() const override;
    double compute(std::span<const double> x, std::span<const double> y) const override;
    double compute(const std::vector<std::string>& x,
                   const std::vector<std::string>& y) const override;
    void validate_pair(std::span<const double> x, std::span<const double> y) const override;
    void validate_pair(const std::vector<std::string>& x,
                       const std::vector<std::string>& y) const override;
    void validate_sample(const Sample& sample) const override;

private:
    KernelPtr inner_;
    mutable std::atomic<std::uint64_t> count_{0};
};

// ---------------------------------------------------------------------------
// Registry and spec strings

/// Constructs a kernel from a family name and explicit parameter values;
/// unspecified parameters take their defaults. Unknown family or parameter
/// names raise ParseError (with a spelling suggestion for the family);
/// out-of-domain values raise ParameterError.
KernelPtr make_kernel(const std::string& name,
                      const std::vector<std::pair<std::string, double>>& params = {});

/// Parses "name(param=value,...)" (case-insensitive; bare "name" allowed;
/// perc accepts true/false). See make_kernel for error behavior.
KernelPtr parse_kernel_spec(const std::string& spec);

/// Registered family names, builtins first, then customs in registration
/// order.
std::vector<std::string> registered_kernel_names();

using KernelFactory =
    std::function<KernelPtr(const std::vector<std::pair<std::string, double>>&)>;

struct KernelRegistration {
    /// Sample used for the admission PSD check; synthesized (20 samplets,
    /// 3 features, fixed seed) when absent.
    std::optional<Sample> psd_sample;
    /// Opt-out for kernels that are knowingly indefinite.
    bool skip_psd_check = false;
    double psd_rel_tol = 1e-8;
};

/// Registers a user-defined kernel family. Unless opted out, the factory's
/// default-parameter kernel must pass validate_psd on the registration
/// sample; failures raise ValidationError and leave the registry unchanged.
void register_kernel(const std::string& name, KernelFactory factory,
                     const KernelRegistration& options = {});

/// Removes a custom family. Builtins cannot be removed.
void unregister_kernel(const std::string& name);

// ---------------------------------------------------------------------------
// Mercer validation

struct PsdReport {
    bool pass = false;
    bool symmetric = false;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    std::size_t n = 0;
    std::string message;
};

/// Builds the n x n Gram matrix of `kernel` over `sample` and checks
/// symmetry (1e-12 relative) and min eigenvalue >= -rel_tol*max(1,|max|).
/// Eigensolver failure is reported in the result, not thrown.
PsdReport validate_psd(const KernelFunction& kernel, const Sample& sample, double rel_tol = 1e-8);

/// Same checks on an already-built Gram matrix.
PsdReport validate_psd(const Matrix& gram, double rel_tol = 1e-8);

}  // namespace kmx
