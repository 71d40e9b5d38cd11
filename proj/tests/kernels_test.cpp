#include "astref/error.hpp"
#include "astref/kernels.hpp"
#include "astref/rng.hpp"

#include <gtest/gtest.h>
#include <omp.h>

using namespace astref;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.uniform(-1, 1);
    return m;
}

Csr random_csr(Rng& rng, std::size_t rows, std::size_t cols) {
    Csr a;
    a.rows = rows;
    a.cols = cols;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto k = rng.below(5);
        for (std::uint64_t i = 0; i < k; ++i) {
            a.indices.push_back(static_cast<int>(rng.below(cols)));
            a.values.push_back(rng.uniform(0, 1));
        }
        a.offsets.push_back(a.indices.size());
    }
    return a;
}

// textbook triple loop with no shared code
Matrix dense_product(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j)
            for (std::size_t k = 0; k < a.cols; ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

Matrix transposed(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

} // namespace

TEST(Kernels, SerialMatchesDenseOracle) {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(30), d = 1 + rng.below(20), e = 1 + rng.below(20);
        const Matrix a = random_matrix(rng, n, d);
        const Matrix b = random_matrix(rng, d, e);
        const Matrix c = random_matrix(rng, n, e);
        const Csr s = random_csr(rng, n, n);
        const Matrix h = random_matrix(rng, n, d);
        Matrix out;
        serial::gemm(a, b, out);
        EXPECT_EQ(out, dense_product(a, b));
        serial::gemm_tn(a, c, out);
        EXPECT_EQ(out, dense_product(transposed(a), c));
        serial::gemm_nt(c, b, out);
        const Matrix expect_nt = dense_product(c, transposed(b));
        ASSERT_EQ(out.rows, expect_nt.rows);
        for (std::size_t i = 0; i < out.data.size(); ++i) EXPECT_NEAR(out.data[i], expect_nt.data[i], 1e-12);
        serial::spmm(s, h, out);
        const Matrix expect_sp = dense_product(s.to_dense(), h);
        for (std::size_t i = 0; i < out.data.size(); ++i) EXPECT_NEAR(out.data[i], expect_sp.data[i], 1e-12);
    }
}

TEST(Kernels, ParallelIsBitIdenticalToSerial) {
    Rng rng(2);
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 1 + rng.below(200), d = 1 + rng.below(40), e = 1 + rng.below(40);
            const Matrix a = random_matrix(rng, n, d);
            const Matrix b = random_matrix(rng, d, e);
            const Matrix c = random_matrix(rng, n, e);
            const Matrix bt = random_matrix(rng, e, d);
            const Csr s = random_csr(rng, n, n);
            const Matrix h = random_matrix(rng, n, d);
            Matrix x, y;
            serial::gemm(a, b, x);
            parallel::gemm(a, b, y);
            EXPECT_EQ(x, y);
            serial::gemm_tn(a, c, x);
            parallel::gemm_tn(a, c, y);
            EXPECT_EQ(x, y);
            serial::gemm_nt(a, bt, x);
            parallel::gemm_nt(a, bt, y);
            EXPECT_EQ(x, y);
            serial::spmm(s, h, x);
            parallel::spmm(s, h, y);
            EXPECT_EQ(x, y);
        }
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST(Kernels, TransposeRoundTrip) {
    Rng rng(3);
    const Csr s = random_csr(rng, 13, 7);
    EXPECT_EQ(s.transpose().to_dense(), transposed(s.to_dense()));
    EXPECT_EQ(s.transpose().transpose().to_dense(), s.to_dense());
}

TEST(Kernels, ShapeErrors) {
    Matrix out;
    EXPECT_THROW(serial::gemm(Matrix(2, 3), Matrix(2, 3), out), DimensionMismatch);
    EXPECT_THROW(parallel::gemm_tn(Matrix(2, 3), Matrix(3, 3), out), DimensionMismatch);
    EXPECT_THROW(parallel::gemm_nt(Matrix(2, 3), Matrix(2, 2), out), DimensionMismatch);
    Csr s;
    s.rows = 2;
    s.cols = 2;
    s.offsets = {0, 0, 0};
    EXPECT_THROW(parallel::spmm(s, Matrix(3, 1), out), DimensionMismatch);
}
