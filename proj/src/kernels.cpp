#include "astref/kernels.hpp"

#include "astref/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace astref {

namespace {

void check(bool ok, const char* what, std::size_t a, std::size_t b) {
    if (!ok) {
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

void shape(Matrix& m, std::size_t r, std::size_t c) {
    m.rows = r;
    m.cols = c;
    m.data.assign(r * c, 0.0);
}

} // namespace

Csr Csr::transpose() const {
    Csr t;
    t.rows = cols;
    t.cols = rows;
    std::vector<std::size_t> count(cols + 1, 0);
    for (int c : indices) ++count[static_cast<std::size_t>(c) + 1];
    for (std::size_t i = 0; i < cols; ++i) count[i + 1] += count[i];
    t.offsets = count;
    t.indices.resize(indices.size());
    t.values.resize(values.size());
    // rows visited ascending, so each transposed row stays sorted by column
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            const auto c = static_cast<std::size_t>(indices[k]);
            const std::size_t slot = count[c]++;
            t.indices[slot] = static_cast<int>(r);
            t.values[slot] = values[k];
        }
    }
    return t;
}

Matrix Csr::to_dense() const {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            m(r, static_cast<std::size_t>(indices[k])) += values[k];
        }
    }
    return m;
}

namespace serial {

void spmm(const Csr& a, const Matrix& h, Matrix& out) {
    check(a.cols == h.rows, "spmm", a.cols, h.rows);
    shape(out, a.rows, h.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t j = 0; j < h.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
                s = std::fma(a.values[k], h(static_cast<std::size_t>(a.indices[k]), j), s);
            }
            out(r, j) = s;
        }
    }
}

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols == b.rows, "gemm", a.cols, b.rows);
    shape(out, a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s = std::fma(a(i, k), b(k, j), s);
            out(i, j) = s;
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.rows == b.rows, "gemm_tn", a.rows, b.rows);
    shape(out, a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.rows; ++k) s = std::fma(a(k, i), b(k, j), s);
            out(i, j) = s;
        }
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols == b.cols, "gemm_nt", a.cols, b.cols);
    shape(out, a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s = std::fma(a(i, k), b(j, k), s);
            out(i, j) = s;
        }
    }
}

} // namespace serial

namespace parallel {

// Register-blocked loops. Each out(i, j) still starts from zero and fuses the
// k-th product in for k = 0, 1, ... in order, so results match the serial loops.

namespace {

constexpr std::size_t kRows = 4;
constexpr std::size_t kCols = 32;
constexpr std::size_t kChunk = 256;

// out[i0..i0+kRows) x [j0..j0+kCols) += sum over k in [k0, k1) of a(i, k) * b(k, j),
// with a(i, k) = a_data[i * a_row + k * a_col].
inline void tile(const double* a_data, std::size_t a_row, std::size_t a_col, const double* b, std::size_t ldb,
                 double* out, std::size_t ldo, std::size_t i0, std::size_t j0, std::size_t k0, std::size_t k1) {
    double acc[kRows][kCols];
    for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t j = 0; j < kCols; ++j) acc[r][j] = out[(i0 + r) * ldo + j0 + j];
    for (std::size_t k = k0; k < k1; ++k) {
        const double* br = b + k * ldb + j0;
        for (std::size_t r = 0; r < kRows; ++r) {
            const double x = a_data[(i0 + r) * a_row + k * a_col];
            for (std::size_t j = 0; j < kCols; ++j) acc[r][j] = std::fma(x, br[j], acc[r][j]);
        }
    }
    for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t j = 0; j < kCols; ++j) out[(i0 + r) * ldo + j0 + j] = acc[r][j];
}

// Generic edge case of `tile` for partial blocks.
inline void edge(const double* a_data, std::size_t a_row, std::size_t a_col, const double* b, std::size_t ldb,
                 double* out, std::size_t ldo, std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1,
                 std::size_t k0, std::size_t k1) {
    for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t k = k0; k < k1; ++k) {
            const double x = a_data[i * a_row + k * a_col];
            const double* br = b + k * ldb;
            for (std::size_t j = j0; j < j1; ++j) out[i * ldo + j] = std::fma(x, br[j], out[i * ldo + j]);
        }
    }
}

// out (m x n, zeroed) += A B where A is m x kk addressed through (a_row, a_col)
// and B is kk x n row-major. Work is split over row blocks; k is chunked so a
// slab of B stays in cache, and chunks run in ascending order.
void blocked(const double* a_data, std::size_t a_row, std::size_t a_col, std::size_t m, std::size_t kk,
             const double* b, std::size_t n, double* out) {
    const std::size_t full_rows = m - m % kRows;
    const std::size_t full_cols = n - n % kCols;
    const auto blocks = static_cast<std::ptrdiff_t>((m + kRows - 1) / kRows);
    for (std::size_t k0 = 0; k0 < kk; k0 += kChunk) {
        const std::size_t k1 = std::min(kk, k0 + kChunk);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
            const std::size_t i0 = static_cast<std::size_t>(bi) * kRows;
            if (i0 < full_rows) {
                for (std::size_t j0 = 0; j0 < full_cols; j0 += kCols) tile(a_data, a_row, a_col, b, n, out, n, i0, j0, k0, k1);
                if (full_cols < n) edge(a_data, a_row, a_col, b, n, out, n, i0, i0 + kRows, full_cols, n, k0, k1);
            } else {
                edge(a_data, a_row, a_col, b, n, out, n, i0, m, 0, n, k0, k1);
            }
        }
    }
}

} // namespace

void spmm(const Csr& a, const Matrix& h, Matrix& out) {
    check(a.cols == h.rows, "spmm", a.cols, h.rows);
    shape(out, a.rows, h.cols);
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
    const std::size_t d = h.cols;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const auto ru = static_cast<std::size_t>(r);
        double* o = out.data.data() + ru * d;
        for (std::size_t k = a.offsets[ru]; k < a.offsets[ru + 1]; ++k) {
            const double w = a.values[k];
            const double* src = h.data.data() + static_cast<std::size_t>(a.indices[k]) * d;
            for (std::size_t j = 0; j < d; ++j) o[j] = std::fma(w, src[j], o[j]);
        }
    }
}

void gemm(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols == b.rows, "gemm", a.cols, b.rows);
    shape(out, a.rows, b.cols);
    blocked(a.data.data(), a.cols, 1, a.rows, a.cols, b.data.data(), b.cols, out.data.data());
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.rows == b.rows, "gemm_tn", a.rows, b.rows);
    shape(out, a.cols, b.cols);
    // row i of A^T is column i of A
    blocked(a.data.data(), 1, a.cols, a.cols, a.rows, b.data.data(), b.cols, out.data.data());
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    check(a.cols == b.cols, "gemm_nt", a.cols, b.cols);
    Matrix bt(b.cols, b.rows);
    for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) bt(j, i) = b(i, j);
    shape(out, a.rows, b.rows);
    blocked(a.data.data(), a.cols, 1, a.rows, a.cols, bt.data.data(), bt.cols, out.data.data());
}

} // namespace parallel

} // namespace astref
