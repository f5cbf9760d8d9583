#include "carbospec/linalg.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {
namespace {

// Block sizes keep the streamed operand resident in cache across row sweeps.
constexpr std::size_t kGemmKBlock = 256;
constexpr std::size_t kGemmRowBlock = 128;

} // namespace

void gemmNN(double* c, const double* a, const double* b,
            std::size_t m, std::size_t k, std::size_t n) {
    const Kernels& kr = kernels();
    parallelFor(m, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t kb = 0; kb < k; kb += kGemmKBlock) {
            const std::size_t kend = kb + kGemmKBlock < k ? kb + kGemmKBlock : k;
            for (std::size_t i = i0; i < i1; ++i) {
                double* crow = c + i * n;
                const double* arow = a + i * k;
                for (std::size_t kk = kb; kk < kend; ++kk) {
                    kr.axpy(crow, arow[kk], b + kk * n, n);
                }
            }
        }
    });
}

void gemmTN(double* c, const double* a, const double* b,
            std::size_t k, std::size_t m, std::size_t n) {
    const Kernels& kr = kernels();
    parallelFor(m, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t ib = i0; ib < i1; ib += kGemmRowBlock) {
            const std::size_t iend = ib + kGemmRowBlock < i1 ? ib + kGemmRowBlock : i1;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const double* arow = a + kk * m;
                const double* brow = b + kk * n;
                for (std::size_t i = ib; i < iend; ++i) {
                    kr.axpy(c + i * n, arow[i], brow, n);
                }
            }
        }
    });
}

void gemmNT(double* c, const double* a, const double* b,
            std::size_t m, std::size_t k, std::size_t n) {
    const Kernels& kr = kernels();
    parallelFor(m, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double* arow = a + i * k;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += kr.dot(arow, b + j * k, k);
            }
        }
    });
}

void gemmNN(Matrix& c, const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols());
    gemmNN(c.data().data(), a.data().data(), b.data().data(), a.rows(), a.cols(), b.cols());
}

void gemmTN(Matrix& c, const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols());
    gemmTN(c.data().data(), a.data().data(), b.data().data(), a.rows(), a.cols(), b.cols());
}

void gemmNT(Matrix& c, const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows());
    gemmNT(c.data().data(), a.data().data(), b.data().data(), a.rows(), a.cols(), b.rows());
}

std::vector<double> matVec(const Matrix& a, const std::vector<double>& x) {
    assert(a.cols() == x.size());
    std::vector<double> out(a.rows());
    const Kernels& kr = kernels();
    parallelFor(a.rows(), [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            out[i] = kr.dot(a.row(i), x.data(), a.cols());
        }
    });
    return out;
}

std::vector<double> vecTMat(const Matrix& a, const std::vector<double>& y) {
    assert(a.rows() == y.size());
    const std::size_t d = a.cols();
    std::vector<double> out(d, 0.0);
    const Kernels& kr = kernels();
    parallelFor(d, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t kk = 0; kk < a.rows(); ++kk) {
            kr.axpy(out.data() + c0, y[kk], a.row(kk) + c0, c1 - c0);
        }
    });
    return out;
}

std::vector<double> luSolve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "luSolve requires a square system");
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::fabs(a.at(r, col));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) {
            throw Error(ErrorCode::SingularSystem, "pivot vanished at column " + std::to_string(col));
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a.at(r, col) * inv;
            if (factor == 0.0) continue;
            a.at(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) {
                a.at(r, j) -= factor * a.at(col, j);
            }
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t j = ri + 1; j < n; ++j) acc -= a.at(ri, j) * x[j];
        x[ri] = acc / a.at(ri, ri);
    }
    return x;
}

} // namespace carbospec
