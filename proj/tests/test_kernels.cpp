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

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "doctest.h"
#include "kmx/errors.hpp"
#include "kmx/kernels.hpp"
#include "kmx/rng.hpp"
#include "kmx/simd.hpp"
#include "support/oracles.hpp"

using namespace kmx;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

std::vector<std::string> toks(std::initializer_list<const char*> v) {
    return {v.begin(), v.end()};
}

// Deliberately indefinite: Gram is -X X^T.
class NegDotKernel final : public KernelFunction {
public:
    NegDotKernel() : KernelFunction("negdot", {}) {}
    double compute(std::span<const double> x, std::span<const double> y) const override {
        return -simd::dot(x, y);
    }
};

// PSD (square of the linear kernel).
class SquaredDotKernel final : public KernelFunction {
public:
    SquaredDotKernel() : KernelFunction("sqdot", {}) {}
    double compute(std::span<const double> x, std::span<const double> y) const override {
        const double d = simd::dot(x, y);
        return d * d;
    }
};

}  // namespace

TEST_CASE("linear kernel frozen values") {
    LinearKernel k;
    CHECK(k(vec({1, 2}), vec({3, 4})) == 11.0);
    CHECK(k(vec({0.3, -0.4}), vec({0.3, -0.4})) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(k(vec({0, 0}), vec({5, -5})) == 0.0);
}

TEST_CASE("polynomial kernel frozen values") {
    CHECK(PolynomialKernel(1.0, 1, 0.0)(vec({1, 2}), vec({3, 4})) == 11.0);
    // (0.5*11 + 1)^2: repeated multiplication keeps this exact in binary.
    CHECK(PolynomialKernel(0.5, 2, 1.0)(vec({1, 2}), vec({3, 4})) == 42.25);
    CHECK(PolynomialKernel(1.0, 3, 1.0)(vec({1, 0}), vec({1, 0})) == 8.0);
}

TEST_CASE("gaussian kernel frozen values") {
    GaussianKernel unit(1.0);
    CHECK(unit(vec({0}), vec({1})) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    GaussianKernel narrow(0.1);
    CHECK(narrow(vec({0}), vec({1})) == doctest::Approx(std::exp(-50.0)).epsilon(1e-12));
    CHECK(narrow(vec({0}), vec({1})) > 0.0);
}

TEST_CASE("laplacian kernel frozen values") {
    CHECK(LaplacianKernel(1.0)(vec({0, 0}), vec({1, 1})) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(LaplacianKernel(0.5)(vec({2}), vec({-1})) ==
          doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
}

TEST_CASE("chi2 kernel frozen values and domain") {
    Chi2Kernel k(1.0);
    // S = 1/1 + 1/1 = 2.
    CHECK(k(vec({1, 0}), vec({0, 1})) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    // The 0/0 coordinate contributes nothing.
    CHECK(k(vec({0, 2}), vec({0, 2})) == 1.0);
    CHECK_THROWS_AS(k(vec({1, -0.5}), vec({1, 1})), ValidationError);
}

TEST_CASE("match kernel frozen values") {
    MatchKernel count(false);
    MatchKernel perc(true);
    CHECK(perc(toks({"a", "b", "c"}), toks({"a", "b", "c"})) == 1.0);
    CHECK(count(toks({"a", "b", "c"}), toks({"a", "x", "c"})) == 2.0);
    CHECK(perc(toks({"a", "b", "c"}), toks({"a", "x", "c"})) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(count(toks({}), toks({})), ValidationError);
    CHECK_THROWS_AS(count(toks({"a"}), toks({"a", "b"})), DimensionError);
}

TEST_CASE("checked evaluation validates inputs") {
    LinearKernel k;
    CHECK_THROWS_AS(k(vec({1, 2}), vec({1})), DimensionError);
    CHECK_THROWS_AS(k(vec({1, std::numeric_limits<double>::quiet_NaN()}), vec({1, 2})),
                    ValidationError);
    // A numeric kernel refuses token input and vice versa.
    CHECK_THROWS_AS(k(toks({"a"}), toks({"a"})), CompatibilityError);
    CHECK_THROWS_AS(MatchKernel()(vec({1}), vec({1})), CompatibilityError);
}

TEST_CASE("self-similarity and range invariants") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng.next_in(0.0, 4.0);  // nonneg so chi2 applies too
        CHECK(GaussianKernel(0.7)(x, x) == 1.0);
        CHECK(LaplacianKernel(1.3)(x, x) == 1.0);
        CHECK(Chi2Kernel(0.5)(x, x) == 1.0);

        std::vector<double> y(5);
        for (auto& v : y) v = rng.next_in(0.0, 4.0);
        for (double val : {GaussianKernel(0.7)(x, y), LaplacianKernel(1.3)(x, y),
                           Chi2Kernel(0.5)(x, y)}) {
            CHECK(val > 0.0);
            CHECK(val <= 1.0);
        }
    }
}

TEST_CASE("evaluation is symmetric and repeatable bit-for-bit") {
    Rng rng(7);
    const GaussianKernel g(0.9);
    const PolynomialKernel p(0.3, 4, 2.0);
    const LaplacianKernel l(0.8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(7), y(7);
        for (auto& v : x) v = rng.next_in(-3.0, 3.0);
        for (auto& v : y) v = rng.next_in(-3.0, 3.0);
        for (const KernelFunction* k :
             {static_cast<const KernelFunction*>(&g), static_cast<const KernelFunction*>(&p),
              static_cast<const KernelFunction*>(&l)}) {
            const double xy = k->compute(x, y);
            const double yx = k->compute(y, x);
            CHECK(xy == yx);
            CHECK(k->compute(x, y) == xy);
        }
    }
}

TEST_CASE("parameter domains are enforced at construction") {
    CHECK_THROWS_AS(GaussianKernel(0.0), ParameterError);
    CHECK_THROWS_AS(GaussianKernel(-1.0), ParameterError);
    CHECK_THROWS_AS(LaplacianKernel(0.0), ParameterError);
    CHECK_THROWS_AS(Chi2Kernel(-0.5), ParameterError);
    CHECK_THROWS_AS(PolynomialKernel(1.0, 0, 1.0), ParameterError);
    CHECK_THROWS_AS(PolynomialKernel(0.0, 2, 1.0), ParameterError);
    CHECK_THROWS_AS(PolynomialKernel(1.0, 2, -1.0), ParameterError);
}

TEST_CASE("format_param_value prints round-trippable decimals") {
    CHECK(format_param_value(1.0) == "1.0");
    CHECK(format_param_value(0.1) == "0.1");
    CHECK(format_param_value(0.05) == "0.05");
    CHECK(format_param_value(2.0) == "2.0");
    CHECK(format_param_value(-3.5) == "-3.5");
}

TEST_CASE("descriptions round-trip through the parser") {
    const std::vector<KernelPtr> kernels = {
        make_kernel("linear"),
        make_kernel("polynomial", {{"gamma", 0.5}, {"degree", 2}, {"coef0", 1.0}}),
        make_kernel("gaussian", {{"sigma", 0.1}}),
        make_kernel("laplacian", {{"gamma", 1.0}}),
        make_kernel("chi2", {{"gamma", 2.0}}),
        make_kernel("match", {{"perc", 1.0}}),
    };
    for (const auto& k : kernels) {
        const KernelPtr back = parse_kernel_spec(k->description());
        CHECK(back->description() == k->description());
    }
    CHECK(make_kernel("gaussian", {{"sigma", 0.1}})->description() == "gaussian(sigma=0.1)");
    CHECK(make_kernel("linear")->description() == "linear()");
    CHECK(make_kernel("match")->description() == "match(perc=false)");
}

TEST_CASE("parse_kernel_spec grammar") {
    CHECK(parse_kernel_spec("linear")->name() == "linear");
    CHECK(parse_kernel_spec("linear()")->name() == "linear");
    CHECK(parse_kernel_spec(" Gaussian( Sigma = 0.5 ) ")->description() ==
          "gaussian(sigma=0.5)");
    CHECK(parse_kernel_spec("match(perc=true)")->description() == "match(perc=true)");
    CHECK(parse_kernel_spec("polynomial(degree=2)")->description() ==
          "polynomial(gamma=1.0,degree=2,coef0=1.0)");

    CHECK_THROWS_AS(parse_kernel_spec(""), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian(sigma=0.5"), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian sigma=0.5)"), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian(sigma)"), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian(sigma=abc)"), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian(sigma=0.5,,)"), ParseError);
    CHECK_THROWS_AS(parse_kernel_spec("gaussian((sigma=1))"), ParseError);

    CHECK_THROWS_AS(parse_kernel_spec("gaussian(sigma=0)"), ParameterError);
    CHECK_THROWS_AS(parse_kernel_spec("polynomial(degree=2.5)"), ParameterError);
    CHECK_THROWS_AS(parse_kernel_spec("match(perc=0.5)"), ParameterError);
}

TEST_CASE("unknown families and parameters come back with guidance") {
    CHECK_THROWS_WITH_AS(parse_kernel_spec("gausian(sigma=1)"),
                         doctest::Contains("did you mean 'gaussian'"), ParseError);
    CHECK_THROWS_WITH_AS(make_kernel("gaussian", {{"gamma", 1.0}}),
                         doctest::Contains("unknown parameter"), ParseError);
    CHECK_THROWS_AS(make_kernel("gaussian", {{"sigma", 1.0}, {"sigma", 2.0}}), ParseError);
    CHECK_THROWS_WITH_AS(make_kernel("frobnicate"), doctest::Contains("valid kernels"),
                         ParseError);
}

TEST_CASE("registered_kernel_names lists builtins first") {
    const auto names = registered_kernel_names();
    REQUIRE(names.size() >= 6);
    CHECK(names[0] == "linear");
    CHECK(names[1] == "polynomial");
    CHECK(names[2] == "gaussian");
    CHECK(names[3] == "laplacian");
    CHECK(names[4] == "chi2");
    CHECK(names[5] == "match");
}

TEST_CASE("custom kernel registration with Mercer admission") {
    // An indefinite kernel is refused and the registry stays unchanged.
    const auto before = registered_kernel_names();
    CHECK_THROWS_AS(
        register_kernel("negdot",
                        [](const auto&) -> KernelPtr { return std::make_shared<NegDotKernel>(); }),
        ValidationError);
    CHECK(registered_kernel_names() == before);
    CHECK_THROWS_AS(make_kernel("negdot"), ParseError);

    // The same kernel is admitted with the opt-out flag.
    KernelRegistration optout;
    optout.skip_psd_check = true;
    register_kernel("negdot",
                    [](const auto&) -> KernelPtr { return std::make_shared<NegDotKernel>(); },
                    optout);
    CHECK(make_kernel("negdot")->name() == "negdot");
    CHECK(parse_kernel_spec("negdot()")->compute(vec({1, 2}), vec({3, 4})) == -11.0);
    unregister_kernel("negdot");
    CHECK_THROWS_AS(make_kernel("negdot"), ParseError);

    // A PSD kernel passes admission without the flag.
    register_kernel("sqdot", [](const auto&) -> KernelPtr {
        return std::make_shared<SquaredDotKernel>();
    });
    CHECK(registered_kernel_names().back() == "sqdot");
    unregister_kernel("sqdot");

    // Duplicate names and builtins are protected.
    CHECK_THROWS_AS(register_kernel("linear",
                                    [](const auto&) -> KernelPtr {
                                        return std::make_shared<SquaredDotKernel>();
                                    }),
                    ParameterError);
    CHECK_THROWS_AS(unregister_kernel("linear"), ParameterError);
    CHECK_THROWS_AS(unregister_kernel("no_such_kernel"), ParameterError);
}

TEST_CASE("validate_psd on bundled kernels") {
    const Matrix x = testing::random_matrix(20, 3, 99, 0.0, 3.0);  // nonneg for chi2
    const Sample numeric = Sample::numeric(x);
    for (const char* spec : {"linear", "polynomial", "gaussian(sigma=0.7)",
                             "laplacian(gamma=0.4)", "chi2(gamma=0.6)"}) {
        const PsdReport report = validate_psd(*parse_kernel_spec(spec), numeric);
        INFO("kernel: ", spec);
        CHECK(report.pass);
        CHECK(report.symmetric);
        CHECK(report.n == 20);
        CHECK(report.min_eigenvalue >= -1e-8 * std::max(1.0, report.max_eigenvalue));
    }

    Rng rng(123);
    const std::vector<std::string> alphabet = {"a", "b", "c"};
    std::vector<std::vector<std::string>> rows(20, std::vector<std::string>(4));
    for (auto& row : rows) {
        for (auto& tok : row) tok = alphabet[rng.bounded(alphabet.size())];
    }
    const Sample tokens = Sample::categorical(rows);
    CHECK(validate_psd(MatchKernel(true), tokens).pass);
    CHECK(validate_psd(MatchKernel(false), tokens).pass);
}

TEST_CASE("validate_psd on explicit matrices") {
    CHECK(validate_psd(Matrix::identity(4)).pass);

    // Eigenvalues of [[1,2],[2,1]] are 3 and -1.
    const PsdReport bad = validate_psd(Matrix::from_rows({{1, 2}, {2, 1}}));
    CHECK_FALSE(bad.pass);
    CHECK(bad.symmetric);
    CHECK(bad.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(bad.max_eigenvalue == doctest::Approx(3.0).epsilon(1e-9));

    const PsdReport asym = validate_psd(Matrix::from_rows({{1, 1}, {0, 1}}));
    CHECK_FALSE(asym.pass);
    CHECK_FALSE(asym.symmetric);

    const PsdReport psd = validate_psd(testing::random_psd(12, 5));
    CHECK(psd.pass);

    CHECK_THROWS_AS(validate_psd(Matrix(2, 3)), ShapeError);
    CHECK_THROWS_AS(validate_psd(Matrix()), ValidationError);
}

TEST_CASE("counting kernel forwards and counts") {
    auto counter = std::make_shared<CountingKernel>(parse_kernel_spec("gaussian(sigma=1.0)"));
    CHECK(counter->evaluations() == 0);
    const double v = counter->compute(vec({0}), vec({1}));
    CHECK(v == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(counter->evaluations() == 1);
    (*counter)(vec({0.5}), vec({0.25}));
    CHECK(counter->evaluations() == 2);
    counter->reset();
    CHECK(counter->evaluations() == 0);
    CHECK(counter->description() == "gaussian(sigma=1.0)");
}
