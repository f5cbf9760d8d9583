// AVX2/FMA kernels. Must stay bit-identical to kernels_scalar.cpp: same lane
// layout (vector j, lane l holds accumulator 4*j+l), same reduction tree,
// fused multiply-adds everywhere the scalar path uses std::fma.

#include "carbospec/kernels.hpp"

#ifdef CARBOSPEC_HAVE_AVX2

#include <cmath>
#include <immintrin.h>

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

double dotAvx2(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        const double* yp = y + b * kLanes;
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(xp), _mm256_loadu_pd(yp), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + 4), _mm256_loadu_pd(yp + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + 8), _mm256_loadu_pd(yp + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(xp + 12), _mm256_loadu_pd(yp + 12), a3);
    }
    alignas(32) double acc[kLanes];
    _mm256_store_pd(acc, a0);
    _mm256_store_pd(acc + 4, a1);
    _mm256_store_pd(acc + 8, a2);
    _mm256_store_pd(acc + 12, a3);
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) {
        acc[t] = std::fma(x[m + t], y[m + t], acc[t]);
    }
    return reduceLanes(acc);
}

double sumAvx2(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(xp));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(xp + 4));
        a2 = _mm256_add_pd(a2, _mm256_loadu_pd(xp + 8));
        a3 = _mm256_add_pd(a3, _mm256_loadu_pd(xp + 12));
    }
    alignas(32) double acc[kLanes];
    _mm256_store_pd(acc, a0);
    _mm256_store_pd(acc + 4, a1);
    _mm256_store_pd(acc + 8, a2);
    _mm256_store_pd(acc + 12, a3);
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) acc[t] += x[m + t];
    return reduceLanes(acc);
}

double sumSquaresAvx2(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        const __m256d v0 = _mm256_loadu_pd(xp);
        const __m256d v1 = _mm256_loadu_pd(xp + 4);
        const __m256d v2 = _mm256_loadu_pd(xp + 8);
        const __m256d v3 = _mm256_loadu_pd(xp + 12);
        a0 = _mm256_fmadd_pd(v0, v0, a0);
        a1 = _mm256_fmadd_pd(v1, v1, a1);
        a2 = _mm256_fmadd_pd(v2, v2, a2);
        a3 = _mm256_fmadd_pd(v3, v3, a3);
    }
    alignas(32) double acc[kLanes];
    _mm256_store_pd(acc, a0);
    _mm256_store_pd(acc + 4, a1);
    _mm256_store_pd(acc + 8, a2);
    _mm256_store_pd(acc + 12, a3);
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) {
        acc[t] = std::fma(x[m + t], x[m + t], acc[t]);
    }
    return reduceLanes(acc);
}

double sumAbsAvx2(const double* x, std::size_t n) {
    const __m256d signMask = _mm256_set1_pd(-0.0);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    const std::size_t blocks = n / kLanes;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xp = x + b * kLanes;
        a0 = _mm256_add_pd(a0, _mm256_andnot_pd(signMask, _mm256_loadu_pd(xp)));
        a1 = _mm256_add_pd(a1, _mm256_andnot_pd(signMask, _mm256_loadu_pd(xp + 4)));
        a2 = _mm256_add_pd(a2, _mm256_andnot_pd(signMask, _mm256_loadu_pd(xp + 8)));
        a3 = _mm256_add_pd(a3, _mm256_andnot_pd(signMask, _mm256_loadu_pd(xp + 12)));
    }
    alignas(32) double acc[kLanes];
    _mm256_store_pd(acc, a0);
    _mm256_store_pd(acc + 4, a1);
    _mm256_store_pd(acc + 8, a2);
    _mm256_store_pd(acc + 12, a3);
    const std::size_t m = blocks * kLanes;
    for (std::size_t t = 0; m + t < n; ++t) acc[t] += std::fabs(x[m + t]);
    return reduceLanes(acc);
}

void axpyAvx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, xv, yv));
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scaleAvx2(double* x, double a, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
    }
    for (; i < n; ++i) x[i] *= a;
}

void reluForwardAvx2(double* y, const double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d mask = _mm256_cmp_pd(xv, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(y + i, _mm256_and_pd(xv, mask));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void reluBackwardAvx2(double* dx, const double* x, const double* dy, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(_mm256_loadu_pd(dy + i), mask));
    }
    for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

void adamStepAvx2(double* p, double* m, double* v, const double* g, std::size_t n,
                  double lr, double beta1, double beta2, double eps,
                  double invBc1, double invBc2) {
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d omb1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d omb2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d bc1 = _mm256_set1_pd(invBc1);
    const __m256d bc2 = _mm256_set1_pd(invBc2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        const __m256d mv = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(omb1, gv));
        const __m256d gg = _mm256_mul_pd(gv, gv);
        const __m256d vv = _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i), _mm256_mul_pd(omb2, gg));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_mul_pd(mv, bc1);
        const __m256d vhat = _mm256_mul_pd(vv, bc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        const __m256d update = _mm256_div_pd(_mm256_mul_pd(lrv, mhat), denom);
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), update));
    }
    const double somb1 = 1.0 - beta1;
    const double somb2 = 1.0 - beta2;
    for (; i < n; ++i) {
        const double gi = g[i];
        const double mi = std::fma(beta1, m[i], somb1 * gi);
        const double vi = std::fma(beta2, v[i], somb2 * (gi * gi));
        m[i] = mi;
        v[i] = vi;
        p[i] = p[i] - (lr * (mi * invBc1)) / (std::sqrt(vi * invBc2) + eps);
    }
}

} // namespace

const Kernels* avx2KernelsOrNull() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
        return nullptr;
    }
    static const Kernels table = {
        "avx2",           dotAvx2,        sumAvx2,    sumSquaresAvx2,
        sumAbsAvx2,       axpyAvx2,       scaleAvx2,  reluForwardAvx2,
        reluBackwardAvx2, adamStepAvx2,
    };
    return &table;
}

} // namespace carbospec

#else

namespace carbospec {
const Kernels* avx2KernelsOrNull() { return nullptr; }
} // namespace carbospec

#endif
