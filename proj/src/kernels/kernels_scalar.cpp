// Scalar reference kernels. This file is the semantic definition the SIMD
// variants must reproduce bit-for-bit; keep the lane structure explicit.

#include "carbospec/kernels.hpp"

#include <cmath>

namespace carbospec {
namespace {

constexpr std::size_t kLanes = 16;

inline double reduceLanes(const double acc[kLanes]) {
    double s[4];
    for (std::size_t l = 0; l < 4; ++l) {
        s[l] = (acc[l] + acc[4 + l]) + (acc[8 + l] + acc[12 + l]);
    }
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double dotScalar(const double* x, const double* y, std::size_t n) {
    double acc[kLanes] = {0.0};
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        const double* yp = y + b * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) {
            acc[l] = std::fma(xp[l], yp[l], acc[l]);
        }
    }
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) {
        acc[t] = std::fma(x[m + t], y[m + t], acc[t]);
    }
    return reduceLanes(acc);
}

double sumScalar(const double* x, std::size_t n) {
    double acc[kLanes] = {0.0};
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += xp[l];
    }
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) acc[t] += x[m + t];
    return reduceLanes(acc);
}

double sumSquaresScalar(const double* x, std::size_t n) {
    double acc[kLanes] = {0.0};
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) {
            acc[l] = std::fma(xp[l], xp[l], acc[l]);
        }
    }
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) {
        acc[t] = std::fma(x[m + t], x[m + t], acc[t]);
    }
    return reduceLanes(acc);
}

double sumAbsScalar(const double* x, std::size_t n) {
    double acc[kLanes] = {0.0};
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += std::fabs(xp[l]);
    }
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) acc[t] += std::fabs(x[m + t]);
    return reduceLanes(acc);
}

void axpyScalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scaleScalar(double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void reluForwardScalar(double* y, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void reluBackwardScalar(double* dx, const double* x, const double* dy, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void adamStepScalar(double* p, double* m, double* v, const double* g, std::size_t n,
                    double lr, double beta1, double beta2, double eps,
                    double invBc1, double invBc2) {
    const double omb1 = 1.0 - beta1;
    const double omb2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        const double mi = std::fma(beta1, m[i], omb1 * gi);
        const double vi = std::fma(beta2, v[i], omb2 * (gi * gi));
        m[i] = mi;
        v[i] = vi;
        const double mhat = mi * invBc1;
        const double vhat = vi * invBc2;
        p[i] = p[i] - (lr * mhat) / (std::sqrt(vhat) + eps);
    }
}

} // namespace

const Kernels& scalarKernels() {
    static const Kernels table = {
        "scalar",         dotScalar,        sumScalar,    sumSquaresScalar,
        sumAbsScalar,     axpyScalar,       scaleScalar,  reluForwardScalar,
        reluBackwardScalar, adamStepScalar,
    };
    return table;
}

} // namespace carbospec
