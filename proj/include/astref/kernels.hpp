#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace astref {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

/// Sparse row-major matrix: row v lists (column, weight) pairs.
struct Csr {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<int> indices;
    std::vector<double> values;

    Csr transpose() const;
    Matrix to_dense() const;
};

/// Kernels used by the GCN. Every variant sums each output element over its
/// inner index in ascending order, so serial and OpenMP results are identical
/// for any thread count. Shapes are checked and DimensionMismatch thrown.
namespace serial {
/// out = A * H
void spmm(const Csr& a, const Matrix& h, Matrix& out);
/// out = A * B
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
/// out = A^T * B
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
/// out = A * B^T
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
} // namespace serial

namespace parallel {
void spmm(const Csr& a, const Matrix& h, Matrix& out);
void gemm(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
} // namespace parallel

} // namespace astref
