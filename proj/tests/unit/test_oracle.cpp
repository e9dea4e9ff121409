#include "ubmat/errors.hpp"
#include "ubmat/oracle.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using ubmat::DenseMatrix;
namespace oracle = ubmat::oracle;
using ubmat::support::max_abs;

DenseMatrix random_spd(ubmat::support::InstanceGenerator& gen, std::ptrdiff_t n) {
  DenseMatrix g(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = 0; j < n; ++j) g(i, j) = gen.uniform(-1, 1);
  DenseMatrix s = oracle::matmul(g, oracle::transpose(g));
  for (std::ptrdiff_t i = 0; i < n; ++i) s(i, i) += 1.0;
  return s;
}

TEST(DenseOracle, MatmulHandCase) {
  const DenseMatrix x(2, 2, {1, 2, 3, 4});
  const DenseMatrix y(2, 2, {5, 6, 7, 8});
  EXPECT_EQ(oracle::matmul(x, y), DenseMatrix(2, 2, {19, 22, 43, 50}));
  EXPECT_EQ(oracle::matmul(DenseMatrix::identity(2), x), x);
  EXPECT_EQ(oracle::matmul(x, DenseMatrix(2, 2)), DenseMatrix(2, 2));
  EXPECT_THROW(oracle::matmul(x, DenseMatrix(3, 1)), ubmat::InvalidInput);
}

TEST(DenseOracle, Determinants) {
  EXPECT_DOUBLE_EQ(oracle::determinant(DenseMatrix::identity(4)), 1.0);
  EXPECT_DOUBLE_EQ(oracle::determinant(DenseMatrix(2, 2, {2, 0, 0, 3})), 6.0);
  EXPECT_DOUBLE_EQ(oracle::determinant(DenseMatrix(2, 2, {0, 1, 1, 0})), -1.0);
  EXPECT_EQ(oracle::determinant(DenseMatrix(2, 2, {1, 2, 2, 4})), 0.0);
}

TEST(DenseOracle, LuSingularPivotThrows) {
  try {
    oracle::lu(DenseMatrix(2, 2, {1, 2, 2, 4}));
    FAIL() << "expected SingularError";
  } catch (const ubmat::SingularError& e) {
    EXPECT_EQ(e.factor(), ubmat::SingularFactor::dense);
  }
}

TEST(DenseOracle, LuReconstructs) {
  ubmat::support::InstanceGenerator gen(11);
  for (int t = 0; t < 20; ++t) {
    const auto n = gen.integer(1, 12);
    DenseMatrix x(n, n);
    for (std::ptrdiff_t i = 0; i < n; ++i)
      for (std::ptrdiff_t j = 0; j < n; ++j) x(i, j) = gen.uniform(-2, 2);
    const auto f = oracle::lu(x);
    const DenseMatrix diff =
        oracle::subtract(oracle::permute_rows(x, f.permutation), oracle::matmul(f.lower, f.upper));
    EXPECT_LE(max_abs(diff), 1e-9);
  }
}

TEST(DenseOracle, InverseTimesMatrixIsIdentity) {
  ubmat::support::InstanceGenerator gen(12);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix s = random_spd(gen, gen.integer(1, 15));
    const DenseMatrix prod = oracle::matmul(s, oracle::inverse(s));
    EXPECT_LE(max_abs(oracle::subtract(prod, DenseMatrix::identity(s.rows()))), 1e-9);
  }
}

TEST(DenseOracle, JacobiSmallCases) {
  const auto e = oracle::symmetric_eigen(DenseMatrix(2, 2, {1, 0, 0, 3}));
  EXPECT_DOUBLE_EQ(e.values[0], 3.0);
  EXPECT_DOUBLE_EQ(e.values[1], 1.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(e.vectors(0, 1)), 1.0);

  const auto j3 = oracle::symmetric_eigen(DenseMatrix(3, 3, 1.0));
  EXPECT_NEAR(j3.values[0], 3.0, 1e-12);
  EXPECT_NEAR(j3.values[1], 0.0, 1e-12);
  EXPECT_NEAR(j3.values[2], 0.0, 1e-12);

  EXPECT_THROW(oracle::symmetric_eigen(DenseMatrix(2, 2, {1, 1, 0, 1})), ubmat::InvalidInput);
}

TEST(DenseOracle, JacobiDiagonalizesAndIsOrthogonal) {
  ubmat::support::InstanceGenerator gen(13);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix s = random_spd(gen, gen.integer(1, 16));
    const auto e = oracle::symmetric_eigen(s);
    const DenseMatrix vt = oracle::transpose(e.vectors);
    DenseMatrix d = oracle::matmul(oracle::matmul(vt, s), e.vectors);
    for (std::ptrdiff_t i = 0; i < s.rows(); ++i) d(i, i) -= e.values[static_cast<std::size_t>(i)];
    EXPECT_LE(max_abs(d), 1e-9);
    EXPECT_LE(max_abs(oracle::subtract(oracle::matmul(vt, e.vectors),
                                       DenseMatrix::identity(s.rows()))),
              1e-10);
    for (std::size_t i = 1; i < e.values.size(); ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  }
}

TEST(DenseOracle, Cholesky) {
  EXPECT_EQ(*oracle::cholesky(DenseMatrix::identity(3)), DenseMatrix::identity(3));
  EXPECT_EQ(*oracle::cholesky(DenseMatrix(1, 1, {4.0})), DenseMatrix(1, 1, {2.0}));
  EXPECT_FALSE(oracle::cholesky(DenseMatrix(2, 2, {1, 2, 2, 1})).has_value());
  ubmat::support::InstanceGenerator gen(14);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix s = random_spd(gen, gen.integer(1, 15));
    const auto l = oracle::cholesky(s);
    ASSERT_TRUE(l.has_value());
    EXPECT_LE(max_abs(oracle::subtract(oracle::matmul(*l, oracle::transpose(*l)), s)), 1e-9);
  }
}

}  // namespace
