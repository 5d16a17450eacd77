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

#include "kmx/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "kmx/errors.hpp"
#include "kmx/rng.hpp"
#include "kmx/simd.hpp"

namespace kmx {

std::string format_param_value(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

// ---------------------------------------------------------------------------
// KernelFunction base

KernelFunction::KernelFunction(std::string name,
                               std::vector<std::pair<std::string, double>> params)
    : name_(std::move(name)), params_(std::move(params)) {}

std::vector<std::pair<std::string, std::string>> KernelFunction::param_strings() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(params_.size());
    for (const auto& [key, value] : params_) out.emplace_back(key, format_param_value(value));
    return out;
}

std::string KernelFunction::description() const {
    std::string out = name_;
    out += '(';
    bool first = true;
    for (const auto& [key, value] : param_strings()) {
        if (!first) out += ',';
        out += key;
        out += '=';
        out += value;
        first = false;
    }
    out += ')';
    return out;
}

double KernelFunction::operator()(std::span<const double> x, std::span<const double> y) const {
    validate_pair(x, y);
    return compute(x, y);
}

double KernelFunction::operator()(const std::vector<std::string>& x,
                                  const std::vector<std::string>& y) const {
    validate_pair(x, y);
    return compute(x, y);
}

void KernelFunction::validate_pair(std::span<const double> x, std::span<const double> y) const {
    if (input_kind() != InputKind::numeric) {
        throw CompatibilityError("kernel '" + name_ + "' expects categorical samplets");
    }
    if (x.size() != y.size()) {
        throw DimensionError("samplet length mismatch: " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw ValidationError("non-finite entry in samplet");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw ValidationError("non-finite entry in samplet");
    }
}

void KernelFunction::validate_pair(const std::vector<std::string>& x,
                                   const std::vector<std::string>& y) const {
    if (input_kind() != InputKind::categorical) {
        throw CompatibilityError("kernel '" + name_ + "' expects numeric samplets");
    }
    if (x.size() != y.size()) {
        throw DimensionError("samplet length mismatch: " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    }
}

double KernelFunction::compute(std::span<const double>, std::span<const double>) const {
    throw CompatibilityError("kernel '" + name_ + "' has no numeric evaluation");
}

double KernelFunction::compute(const std::vector<std::string>&,
                               const std::vector<std::string>&) const {
    throw CompatibilityError("kernel '" + name_ + "' has no categorical evaluation");
}

void KernelFunction::validate_sample(const Sample& sample) const {
    if (sample.kind() != input_kind()) {
        throw CompatibilityError("kernel '" + name_ + "' expects " +
                                 input_kind_name(input_kind()) + " samplets, got " +
                                 input_kind_name(sample.kind()));
    }
}

// ---------------------------------------------------------------------------
// Bundled kernels

namespace {

void require_positive(const std::string& kernel, const std::string& param, double v) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw ParameterError(kernel + ": " + param + " must be a positive real, got " +
                             std::to_string(v));
    }
}

}  // namespace

LinearKernel::LinearKernel() : KernelFunction("linear", {}) {}

double LinearKernel::compute(std::span<const double> x, std::span<const double> y) const {
    return simd::dot(x, y);
}

PolynomialKernel::PolynomialKernel(double gamma, int degree, double coef0)
    : KernelFunction("polynomial", {{"gamma", gamma},
                                    {"degree", static_cast<double>(degree)},
                                    {"coef0", coef0}}),
      gamma_(gamma),
      degree_(degree),
      coef0_(coef0) {
    require_positive("polynomial", "gamma", gamma);
    if (degree < 1) {
        throw ParameterError("polynomial: degree must be >= 1, got " + std::to_string(degree));
    }
    if (!(std::isfinite(coef0) && coef0 >= 0.0)) {
        throw ParameterError("polynomial: coef0 must be a nonnegative real, got " +
                             std::to_string(coef0));
    }
}

std::vector<std::pair<std::string, std::string>> PolynomialKernel::param_strings() const {
    return {{"gamma", format_param_value(gamma_)},
            {"degree", std::to_string(degree_)},
            {"coef0", format_param_value(coef0_)}};
}

double PolynomialKernel::compute(std::span<const double> x, std::span<const double> y) const {
    const double base = gamma_ * simd::dot(x, y) + coef0_;
    // Sequential multiplication: exact for the small degrees in use and
    // bit-stable regardless of libm.
    double r = base;
    for (int k = 1; k < degree_; ++k) r *= base;
    return r;
}

GaussianKernel::GaussianKernel(double sigma)
    : KernelFunction("gaussian", {{"sigma", sigma}}),
      neg_inv_two_sigma_sq_(-1.0 / (2.0 * sigma * sigma)) {
    require_positive("gaussian", "sigma", sigma);
}

double GaussianKernel::compute(std::span<const double> x, std::span<const double> y) const {
    return std::exp(neg_inv_two_sigma_sq_ * simd::squared_distance(x, y));
}

LaplacianKernel::LaplacianKernel(double gamma)
    : KernelFunction("laplacian", {{"gamma", gamma}}), gamma_(gamma) {
    require_positive("laplacian", "gamma", gamma);
}

double LaplacianKernel::compute(std::span<const double> x, std::span<const double> y) const {
    return std::exp(-gamma_ * simd::manhattan_distance(x, y));
}

Chi2Kernel::Chi2Kernel(double gamma)
    : KernelFunction("chi2", {{"gamma", gamma}}), gamma_(gamma) {
    require_positive("chi2", "gamma", gamma);
}

double Chi2Kernel::compute(std::span<const double> x, std::span<const double> y) const {
    return std::exp(-gamma_ * simd::chi_squared_sum(x, y));
}

void Chi2Kernel::validate_pair(std::span<const double> x, std::span<const double> y) const {
    KernelFunction::validate_pair(x, y);
    for (double v : x) {
        if (v < 0.0) throw ValidationError("chi2: negative entry " + std::to_string(v));
    }
    for (double v : y) {
        if (v < 0.0) throw ValidationError("chi2: negative entry " + std::to_string(v));
    }
}

void Chi2Kernel::validate_sample(const Sample& sample) const {
    KernelFunction::validate_sample(sample);
    const Matrix& f = sample.features();
    for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t j = 0; j < f.cols(); ++j) {
            if (f(i, j) < 0.0) {
                throw ValidationError("chi2: negative feature at row " + std::to_string(i) +
                                      ", column " + std::to_string(j));
            }
        }
    }
}

MatchKernel::MatchKernel(bool return_perc)
    : KernelFunction("match", {{"perc", return_perc ? 1.0 : 0.0}}), return_perc_(return_perc) {}

std::vector<std::pair<std::string, std::string>> MatchKernel::param_strings() const {
    return {{"perc", return_perc_ ? "true" : "false"}};
}

double MatchKernel::compute(const std::vector<std::string>& x,
                            const std::vector<std::string>& y) const {
    std::size_t matches = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == y[i]) ++matches;
    }
    if (!return_perc_) return static_cast<double>(matches);
    return static_cast<double>(matches) / static_cast<double>(x.size());
}

void MatchKernel::validate_pair(const std::vector<std::string>& x,
                                const std::vector<std::string>& y) const {
    KernelFunction::validate_pair(x, y);
    if (x.empty()) throw ValidationError("match: empty token vectors");
}

void MatchKernel::validate_sample(const Sample& sample) const {
    KernelFunction::validate_sample(sample);
    if (sample.rows() > 0 && sample.cols() == 0) {
        throw ValidationError("match: empty token vectors");
    }
}

CountingKernel::CountingKernel(KernelPtr inner)
    : KernelFunction(inner ? inner->name() : "", inner ? inner->params()
                                                       : std::vector<std::pair<std::string, double>>{}),
      inner_(std::move(inner)) {
    if (!inner_) throw ParameterError("CountingKernel: null inner kernel");
}

std::vector<std::pair<std::string, std::string>> CountingKernel::param_strings() const {
    return inner_->param_strings();
}

double CountingKernel::compute(std::span<const double> x, std::span<const double> y) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_->compute(x, y);
}

double CountingKernel::compute(const std::vector<std::string>& x,
                               const std::vector<std::string>& y) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_->compute(x, y);
}

void CountingKernel::validate_pair(std::span<const double> x, std::span<const double> y) const {
    inner_->validate_pair(x, y);
}

void CountingKernel::validate_pair(const std::vector<std::string>& x,
                                   const std::vector<std::string>& y) const {
    inner_->validate_pair(x, y);
}

void CountingKernel::validate_sample(const Sample& sample) const {
    inner_->validate_sample(sample);
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

using ParamList = std::vector<std::pair<std::string, double>>;

// Validates parameter names, rejects duplicates, returns name -> value.
std::map<std::string, double> collect_params(const std::string& kernel, const ParamList& given,
                                             const std::vector<std::string>& allowed) {
    std::map<std::string, double> out;
    for (const auto& [key, value] : given) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string valid = allowed.empty() ? "none" : join(allowed);
            throw ParseError("unknown parameter '" + key + "' for kernel '" + kernel +
                             "'; valid parameters: " + valid);
        }
        if (!out.emplace(key, value).second) {
            throw ParseError("duplicate parameter '" + key + "' for kernel '" + kernel + "'");
        }
    }
    return out;
}

double take(const std::map<std::string, double>& params, const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
}

int take_int(const std::map<std::string, double>& params, const std::string& key, int dflt,
             const std::string& kernel) {
    auto it = params.find(key);
    if (it == params.end()) return dflt;
    const double v = it->second;
    if (!(std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e9)) {
        throw ParameterError(kernel + ": " + key + " must be an integer, got " +
                             format_param_value(v));
    }
    return static_cast<int>(v);
}

struct RegistryEntry {
    KernelFactory factory;
    std::vector<std::string> param_names;
    bool builtin = false;
};

struct Registry {
    std::mutex mu;
    std::vector<std::string> order;
    std::map<std::string, RegistryEntry> entries;

    void put(const std::string& name, RegistryEntry entry) {
        order.push_back(name);
        entries.emplace(name, std::move(entry));
    }
};

Registry& registry() {
    static Registry* r = [] {
        auto* reg = new Registry();
        reg->put("linear", {[](const ParamList& p) -> KernelPtr {
                                collect_params("linear", p, {});
                                return std::make_shared<LinearKernel>();
                            },
                            {},
                            true});
        reg->put("polynomial",
                 {[](const ParamList& p) -> KernelPtr {
                      auto m = collect_params("polynomial", p, {"gamma", "degree", "coef0"});
                      return std::make_shared<PolynomialKernel>(
                          take(m, "gamma", 1.0), take_int(m, "degree", 3, "polynomial"),
                          take(m, "coef0", 1.0));
                  },
                  {"gamma", "degree", "coef0"},
                  true});
        reg->put("gaussian", {[](const ParamList& p) -> KernelPtr {
                                  auto m = collect_params("gaussian", p, {"sigma"});
                                  return std::make_shared<GaussianKernel>(take(m, "sigma", 1.0));
                              },
                              {"sigma"},
                              true});
        reg->put("laplacian", {[](const ParamList& p) -> KernelPtr {
                                   auto m = collect_params("laplacian", p, {"gamma"});
                                   return std::make_shared<LaplacianKernel>(take(m, "gamma", 1.0));
                               },
                               {"gamma"},
                               true});
        reg->put("chi2", {[](const ParamList& p) -> KernelPtr {
                              auto m = collect_params("chi2", p, {"gamma"});
                              return std::make_shared<Chi2Kernel>(take(m, "gamma", 1.0));
                          },
                          {"gamma"},
                          true});
        reg->put("match", {[](const ParamList& p) -> KernelPtr {
                               auto m = collect_params("match", p, {"perc"});
                               const double v = take(m, "perc", 0.0);
                               if (v != 0.0 && v != 1.0) {
                                   throw ParameterError("match: perc must be true or false");
                               }
                               return std::make_shared<MatchKernel>(v == 1.0);
                           },
                           {"perc"},
                           true});
        return reg;
    }();
    return *r;
}

Sample synthesize_psd_sample(InputKind kind) {
    Rng rng(0x5EED5EEDULL);
    const std::size_t n = 20, p = 3;
    if (kind == InputKind::numeric) {
        // Strictly positive values keep the sample valid for chi2-like
        // domains.
        Matrix f(n, p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < p; ++j) f(i, j) = rng.next_in(0.05, 1.0);
        }
        return Sample::numeric(std::move(f));
    }
    const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
    std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(p));
    for (auto& row : rows) {
        for (auto& tok : row) tok = alphabet[rng.bounded(alphabet.size())];
    }
    return Sample::categorical(std::move(rows));
}

}  // namespace

KernelPtr make_kernel(const std::string& name, const ParamList& params) {
    const std::string key = to_lower(trim(name));
    Registry& reg = registry();
    KernelFactory factory;
    {
        std::lock_guard<std::mutex> lock(reg.mu);
        auto it = reg.entries.find(key);
        if (it == reg.entries.end()) {
            std::string best;
            std::size_t best_dist = 3;
            for (const auto& candidate : reg.order) {
                const std::size_t d = levenshtein(key, candidate);
                if (d < best_dist || (d == best_dist && best.empty())) {
                    best = candidate;
                    best_dist = d;
                }
            }
            std::string msg = "unknown kernel '" + key + "'";
            if (!best.empty()) msg += "; did you mean '" + best + "'?";
            msg += " valid kernels: " + join(reg.order);
            throw ParseError(msg);
        }
        factory = it->second.factory;
    }
    return factory(params);
}

KernelPtr parse_kernel_spec(const std::string& spec) {
    const std::string text = trim(spec);
    if (text.empty()) throw ParseError("empty kernel spec");

    const std::size_t open = text.find('(');
    std::string name;
    ParamList params;
    if (open == std::string::npos) {
        if (text.find(')') != std::string::npos) {
            throw ParseError("malformed kernel spec '" + text + "': ')' without '('");
        }
        name = text;
    } else {
        name = trim(text.substr(0, open));
        if (text.back() != ')') {
            throw ParseError("malformed kernel spec '" + text + "': expected trailing ')'");
        }
        const std::string inner = text.substr(open + 1, text.size() - open - 2);
        if (inner.find('(') != std::string::npos || inner.find(')') != std::string::npos) {
            throw ParseError("malformed kernel spec '" + text + "': nested parentheses");
        }
        std::stringstream ss(inner);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            const std::string item = trim(piece);
            if (item.empty()) {
                if (trim(inner).empty() && params.empty()) break;  // "name()"
                throw ParseError("malformed kernel spec '" + text + "': empty parameter");
            }
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw ParseError("malformed kernel spec '" + text + "': expected param=value in '" +
                                 item + "'");
            }
            const std::string pkey = to_lower(trim(item.substr(0, eq)));
            const std::string pval = to_lower(trim(item.substr(eq + 1)));
            if (pkey.empty() || pval.empty()) {
                throw ParseError("malformed kernel spec '" + text + "': expected param=value in '" +
                                 item + "'");
            }
            double value = 0.0;
            if (pval == "true") {
                value = 1.0;
            } else if (pval == "false") {
                value = 0.0;
            } else {
                const char* first = pval.data();
                const char* last = pval.data() + pval.size();
                auto res = std::from_chars(first, last, value);
                if (res.ec != std::errc{} || res.ptr != last) {
                    throw ParseError("cannot parse value '" + pval + "' for parameter '" + pkey +
                                     "'");
                }
            }
            params.emplace_back(pkey, value);
        }
    }
    if (name.empty()) throw ParseError("malformed kernel spec '" + text + "': missing kernel name");
    return make_kernel(name, params);
}

std::vector<std::string> registered_kernel_names() {
    Registry& reg = registry();
    std::lock_guard<std::mutex> lock(reg.mu);
    return reg.order;
}

void register_kernel(const std::string& name, KernelFactory factory,
                     const KernelRegistration& options) {
    const std::string key = to_lower(trim(name));
    if (key.empty()) throw ParameterError("kernel name must be non-empty");
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            throw ParameterError("kernel name '" + key +
                                 "' must contain only letters, digits, and underscores");
        }
    }
    if (!factory) throw ParameterError("kernel factory must be callable");

    Registry& reg = registry();
    {
        std::lock_guard<std::mutex> lock(reg.mu);
        if (reg.entries.count(key)) {
            throw ParameterError("kernel '" + key + "' is already registered");
        }
    }

    // Admission check outside the lock: build the default kernel and verify
    // Mercer's condition on the registration sample.
    KernelPtr probe = factory({});
    if (!probe) throw ParameterError("kernel factory for '" + key + "' returned null");
    if (!options.skip_psd_check) {
        const Sample sample = options.psd_sample ? *options.psd_sample
                                                 : synthesize_psd_sample(probe->input_kind());
        const PsdReport report = validate_psd(*probe, sample, options.psd_rel_tol);
        if (!report.pass) {
            throw ValidationError("kernel '" + key + "' failed the Mercer check: " +
                                  report.message);
        }
    }

    std::lock_guard<std::mutex> lock(reg.mu);
    if (reg.entries.count(key)) {
        throw ParameterError("kernel '" + key + "' is already registered");
    }
    reg.put(key, {std::move(factory), {}, false});
}

void unregister_kernel(const std::string& name) {
    const std::string key = to_lower(trim(name));
    Registry& reg = registry();
    std::lock_guard<std::mutex> lock(reg.mu);
    auto it = reg.entries.find(key);
    if (it == reg.entries.end()) throw ParameterError("kernel '" + key + "' is not registered");
    if (it->second.builtin) throw ParameterError("kernel '" + key + "' is builtin");
    reg.entries.erase(it);
    reg.order.erase(std::remove(reg.order.begin(), reg.order.end(), key), reg.order.end());
}

// ---------------------------------------------------------------------------
// Mercer validation

PsdReport validate_psd(const Matrix& gram, double rel_tol) {
    if (gram.rows() != gram.cols()) {
        throw ShapeError("validate_psd: matrix is " + std::to_string(gram.rows()) + "x" +
                         std::to_string(gram.cols()) + ", expected square");
    }
    if (gram.rows() == 0) throw ValidationError("validate_psd: empty matrix");

    PsdReport report;
    report.n = gram.rows();
    report.symmetric = gram.is_symmetric(1e-12);

    const std::size_t n = gram.rows();
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                0.5 * (gram(i, j) + gram(j, i));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        report.pass = false;
        report.message = "eigendecomposition failed";
        return report;
    }
    report.min_eigenvalue = solver.eigenvalues()(0);
    report.max_eigenvalue = solver.eigenvalues()(static_cast<Eigen::Index>(n) - 1);

    const double threshold = -rel_tol * std::max(1.0, std::abs(report.max_eigenvalue));
    const bool eig_ok = report.min_eigenvalue >= threshold;
    report.pass = report.symmetric && eig_ok;
    if (report.pass) {
        report.message = "psd";
    } else if (!report.symmetric) {
        report.message = "asymmetric: max |K - K^T| = " + std::to_string(gram.max_asymmetry());
    } else {
        report.message = "min eigenvalue " + std::to_string(report.min_eigenvalue) +
                         " below tolerance " + std::to_string(threshold);
    }
    return report;
}

PsdReport validate_psd(const KernelFunction& kernel, const Sample& sample, double rel_tol) {
    const std::size_t n = sample.rows();
    if (n < 2) throw ValidationError("validate_psd: need at least 2 samplets");
    kernel.validate_sample(sample);

    // Full double loop (not mirrored) so the symmetry check exercises the
    // evaluator itself.
    Matrix gram(n, n);
    if (sample.kind() == InputKind::numeric) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                gram(i, j) = kernel.compute(sample.numeric_row(i), sample.numeric_row(j));
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                gram(i, j) = kernel.compute(sample.token_row(i), sample.token_row(j));
            }
        }
    }
    return validate_psd(gram, rel_tol);
}

}  // namespace kmx
