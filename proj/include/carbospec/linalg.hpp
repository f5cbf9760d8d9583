#pragma once

#include <cstddef>
#include <vector>

namespace carbospec {

// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double value) { data_.assign(data_.size(), value); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// GEMM primitives on contiguous row-major buffers. All accumulate into C
// (callers zero it first when needed) and keep a fixed per-element
// accumulation order (k ascending), so results do not depend on thread count
// or block size.
void gemmNN(double* c, const double* a, const double* b,
            std::size_t m, std::size_t k, std::size_t n);           // C(m,n) += A(m,k) B(k,n)
void gemmTN(double* c, const double* a, const double* b,
            std::size_t k, std::size_t m, std::size_t n);           // C(m,n) += A(k,m)^T B(k,n)
void gemmNT(double* c, const double* a, const double* b,
            std::size_t m, std::size_t k, std::size_t n);           // C(m,n) += A(m,k) B(n,k)^T

void gemmNN(Matrix& c, const Matrix& a, const Matrix& b);
void gemmTN(Matrix& c, const Matrix& a, const Matrix& b);
void gemmNT(Matrix& c, const Matrix& a, const Matrix& b);

// out[i] = dot(A.row(i), x)
std::vector<double> matVec(const Matrix& a, const std::vector<double>& x);
// out = A^T * y with A n x d, y length n
std::vector<double> vecTMat(const Matrix& a, const std::vector<double>& y);

// Gaussian elimination with partial pivoting; throws Error(SingularSystem)
// when a pivot vanishes. A and b are consumed.
std::vector<double> luSolve(Matrix a, std::vector<double> b);

} // namespace carbospec
