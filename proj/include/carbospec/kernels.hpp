#pragma once

#include <cstddef>

namespace carbospec {

// Inner-loop arithmetic kernels. Two interchangeable implementations exist:
// a portable scalar reference and an AVX2 variant, selected once at runtime.
//
// Both follow the same arithmetic contract so their outputs are bit-identical:
//  - multiply-accumulate is fused (std::fma / vfmadd, both correctly rounded),
//  - reductions keep 16 independent lane accumulators over blocks of 16
//    elements, tail elements land in lanes 0..14, and lanes collapse in a
//    fixed binary tree,
//  - elementwise ops round once per element.
// The equivalence tests assert bitwise equality between the two tables.
struct Kernels {
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*sumSquares)(const double* x, std::size_t n);
    double (*sumAbs)(const double* x, std::size_t n);

    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // x[i] *= a
    void (*scale)(double* x, double a, std::size_t n);

    // y[i] = x[i] > 0 ? x[i] : 0
    void (*reluForward)(double* y, const double* x, std::size_t n);
    // dx[i] = x[i] > 0 ? dy[i] : 0  (derivative at exactly 0 is 0)
    void (*reluBackward)(double* dx, const double* x, const double* dy, std::size_t n);

    // Fused Adam update. invBc1/invBc2 are the 1/(1-beta^t) bias corrections,
    // computed once per step by the caller.
    void (*adamStep)(double* p, double* m, double* v, const double* g, std::size_t n,
                     double lr, double beta1, double beta2, double eps,
                     double invBc1, double invBc2);
};

const Kernels& scalarKernels();

// Null when the binary was built without AVX2 support or the CPU lacks
// AVX2/FMA.
const Kernels* avx2KernelsOrNull();

// Active table. Resolution: forceKernelBackend() > CARBOSPEC_KERNELS env
// ("scalar" | "avx2" | "auto") > auto-detect.
const Kernels& kernels();
void forceKernelBackend(const char* backend);

} // namespace carbospec
