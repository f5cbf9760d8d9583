#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "carbospec/kernels.hpp"
#include "carbospec/rng.hpp"

using namespace carbospec;

namespace {

std::vector<double> randomVector(Rng& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17,
                                         31, 32, 33, 63, 64, 100, 255, 1024, 2701};

bool bitEqual(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

} // namespace

TEST_CASE("scalar dot matches a plain loop within rounding") {
    Rng rng(7);
    const auto x = randomVector(rng, 301);
    const auto y = randomVector(rng, 301);
    long double expected = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        expected += static_cast<long double>(x[i]) * y[i];
    }
    const double got = scalarKernels().dot(x.data(), y.data(), x.size());
    CHECK(std::fabs(got - static_cast<double>(expected)) <
          1e-12 * std::fabs(static_cast<double>(expected)) + 1e-12);
}

TEST_CASE("relu semantics are pinned at zero and negative zero") {
    const double in[4] = {-0.0, 0.0, -1.5, 2.5};
    double out[4];
    scalarKernels().reluForward(out, in, 4);
    CHECK(bitEqual(out[0], 0.0)); // -0 maps to +0
    CHECK(bitEqual(out[1], 0.0));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == 2.5);

    const double dy[4] = {1.0, 2.0, 3.0, 4.0};
    double dx[4];
    scalarKernels().reluBackward(dx, in, dy, 4);
    CHECK(dx[0] == 0.0); // derivative at 0 is 0
    CHECK(dx[1] == 0.0);
    CHECK(dx[2] == 0.0);
    CHECK(dx[3] == 4.0);
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
    const Kernels* avx2 = avx2KernelsOrNull();
    if (avx2 == nullptr) {
        MESSAGE("AVX2 unavailable; equivalence suite skipped");
        return;
    }
    const Kernels& ref = scalarKernels();
    Rng rng(42);

    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const auto x = randomVector(rng, n);
        const auto y = randomVector(rng, n);

        CHECK(bitEqual(ref.dot(x.data(), y.data(), n), avx2->dot(x.data(), y.data(), n)));
        CHECK(bitEqual(ref.sum(x.data(), n), avx2->sum(x.data(), n)));
        CHECK(bitEqual(ref.sumSquares(x.data(), n), avx2->sumSquares(x.data(), n)));
        CHECK(bitEqual(ref.sumAbs(x.data(), n), avx2->sumAbs(x.data(), n)));

        auto y1 = y;
        auto y2 = y;
        ref.axpy(y1.data(), 1.7, x.data(), n);
        avx2->axpy(y2.data(), 1.7, x.data(), n);
        CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

        auto s1 = x;
        auto s2 = x;
        ref.scale(s1.data(), -0.37, n);
        avx2->scale(s2.data(), -0.37, n);
        CHECK(std::memcmp(s1.data(), s2.data(), n * sizeof(double)) == 0);

        std::vector<double> r1(n), r2(n);
        ref.reluForward(r1.data(), x.data(), n);
        avx2->reluForward(r2.data(), x.data(), n);
        CHECK(std::memcmp(r1.data(), r2.data(), n * sizeof(double)) == 0);

        ref.reluBackward(r1.data(), x.data(), y.data(), n);
        avx2->reluBackward(r2.data(), x.data(), y.data(), n);
        CHECK(std::memcmp(r1.data(), r2.data(), n * sizeof(double)) == 0);
    }
}

TEST_CASE("avx2 adam step is bit-identical to the scalar reference") {
    const Kernels* avx2 = avx2KernelsOrNull();
    if (avx2 == nullptr) return;
    Rng rng(11);
    for (std::size_t n : {1u, 4u, 5u, 64u, 333u}) {
        auto p1 = randomVector(rng, n);
        auto m1 = randomVector(rng, n, -0.1, 0.1);
        auto v1 = randomVector(rng, n, 0.0, 0.1);
        const auto g = randomVector(rng, n);
        auto p2 = p1;
        auto m2 = m1;
        auto v2 = v1;
        scalarKernels().adamStep(p1.data(), m1.data(), v1.data(), g.data(), n, 1e-3, 0.9, 0.999,
                                 1e-8, 1.0 / (1 - 0.9), 1.0 / (1 - 0.999));
        avx2->adamStep(p2.data(), m2.data(), v2.data(), g.data(), n, 1e-3, 0.9, 0.999, 1e-8,
                       1.0 / (1 - 0.9), 1.0 / (1 - 0.999));
        CHECK(std::memcmp(p1.data(), p2.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(double)) == 0);
        CHECK(std::memcmp(v1.data(), v2.data(), n * sizeof(double)) == 0);
    }
}

TEST_CASE("adam step with zero gradients leaves parameters untouched") {
    const std::size_t n = 37;
    std::vector<double> p(n, 1.5), m(n, 0.0), v(n, 0.0), g(n, 0.0);
    for (int t = 1; t <= 5; ++t) {
        scalarKernels().adamStep(p.data(), m.data(), v.data(), g.data(), n, 1e-3, 0.9, 0.999, 1e-8,
                                 1.0 / (1 - std::pow(0.9, t)), 1.0 / (1 - std::pow(0.999, t)));
    }
    for (double x : p) CHECK(x == 1.5);
}

TEST_CASE("kernel dispatch honours the forced backend") {
    forceKernelBackend("scalar");
    CHECK(std::string(kernels().name) == "scalar");
    if (avx2KernelsOrNull() != nullptr) {
        forceKernelBackend("avx2");
        CHECK(std::string(kernels().name) == "avx2");
    }
    forceKernelBackend("auto");
}
