#include <gtest/gtest.h>

#include <random>

#include "iochain/matrix.hpp"
#include "support/oracles.hpp"

using namespace iochain;

namespace {

Matrix random_nonnegative(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) > 0.25) m(i, j) = scale * unit(rng);
  return m;
}

// Rows rescaled to random sums in [0.2 cap, cap].
Matrix random_substochastic(std::mt19937_64& rng, std::size_t n, double cap) {
  Matrix m = random_nonnegative(rng, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j);
    if (s == 0.0) continue;
    const double target = cap * (0.2 + 0.8 * unit(rng));
    for (std::size_t j = 0; j < n; ++j) m(i, j) *= target / s;
  }
  return m;
}

}  // namespace

TEST(MatrixConstruction, RejectsEmptyRaggedAndNonFinite) {
  EXPECT_THROW(Matrix(0, 2), DimensionMismatch);
  EXPECT_THROW((Matrix{{1.0, 2.0}, {3.0}}), DimensionMismatch);
  EXPECT_THROW(Matrix(1, 1, std::numeric_limits<double>::quiet_NaN()), InputError);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionMismatch);
}

TEST(MatrixArithmetic, ProductsAndSums) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(a * b, (Matrix{{2, 1}, {4, 3}}));
  EXPECT_EQ((a * Vector{1, 1}), (Vector{3, 7}));
  EXPECT_EQ(left_multiply(Vector{1, 1}, a), (Vector{4, 6}));
  EXPECT_EQ(a + b, (Matrix{{1, 3}, {4, 4}}));
  EXPECT_EQ(a - a, Matrix(2, 2));
  EXPECT_EQ(a.transpose(), (Matrix{{1, 3}, {2, 4}}));
  EXPECT_EQ(a.row_sums(), (Vector{3, 7}));
  EXPECT_EQ(a.col_sums(), (Vector{4, 6}));
  EXPECT_THROW(a * Matrix(3, 3), DimensionMismatch);
}

TEST(LuInvert, IdentityIsItsOwnInverse) {
  EXPECT_EQ(lu_invert(Matrix::identity(3)), Matrix::identity(3));
}

TEST(LuInvert, TwoByTwoByHand) {
  const Matrix inv = lu_invert(Matrix{{0.9, -0.4}, {-0.1, 0.6}});
  EXPECT_LE(max_abs_diff(inv, Matrix{{1.2, 0.8}, {0.2, 1.8}}), 1e-14);
}

TEST(LuInvert, RankOneIsSingular) {
  EXPECT_THROW(lu_invert(Matrix{{1, 1}, {1, 1}}), SingularMatrix);
  EXPECT_THROW(lu_invert(Matrix(2, 3)), DimensionMismatch);
}

TEST(LuInvert, NeedsPivoting) {
  const Matrix m{{0, 1}, {1, 0}};
  EXPECT_EQ(lu_invert(m), m);
}

TEST(LuInvert, ResidualPropertyOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const Matrix m = Matrix::identity(n) - random_substochastic(rng, n, 0.95);
    const Matrix inv = lu_invert(m);
    EXPECT_LE(max_abs_diff(m * inv, Matrix::identity(n)), 1e-9);
    EXPECT_LE(max_abs_diff(inv, fixtures::gauss_jordan_inverse(m)), 1e-9);
  }
}

TEST(PerronRoot, Examples) {
  EXPECT_DOUBLE_EQ(perron_root(Matrix::identity(2)).root, 1.0);
  EXPECT_DOUBLE_EQ(perron_root(Matrix(3, 3)).root, 0.0);
  EXPECT_NEAR(perron_root(Matrix{{0.1, 0.4}, {0.1, 0.4}}).root, 0.5, 1e-12);
}

TEST(PerronRoot, RankOneAgainstCharacteristicPolynomial) {
  // lambda^2 - 0.5 lambda = 0 for [[0.1,0.4],[0.1,0.4]]
  const double root = perron_root(Matrix{{0.1, 0.4}, {0.1, 0.4}}).root;
  EXPECT_NEAR(root * root - 0.5 * root, 0.0, 1e-12);
}

TEST(PerronRoot, PeriodicMatrixUsesShift) {
  const PerronResult r = perron_root(Matrix{{0, 0.5}, {0.5, 0}});
  EXPECT_NEAR(r.root, 0.5, 1e-10);
  EXPECT_NEAR(r.vector[0], r.vector[1], 1e-8);
}

TEST(PerronRoot, RejectsNegativeEntries) {
  EXPECT_THROW(perron_root(Matrix{{0.1, -0.2}, {0.0, 0.3}}), InputError);
}

TEST(PerronRoot, RowSumSandwichProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Matrix m = random_nonnegative(rng, n, 2.0);
    const Vector rs = m.row_sums();
    const double root = perron_root(m).root;
    EXPECT_GE(root, *std::min_element(rs.begin(), rs.end()) - 1e-9);
    EXPECT_LE(root, *std::max_element(rs.begin(), rs.end()) + 1e-9);
  }
}

TEST(Hadamard, Examples) {
  const Matrix m{{0.3, -2}, {5, 0.25}};
  EXPECT_EQ(hadamard(m, Matrix(2, 2, 1.0)), m);
  EXPECT_EQ(hadamard(m, Matrix(2, 2)), Matrix(2, 2));
  EXPECT_EQ(hadamard(Matrix{{1, 0}, {1, 1}}, Matrix{{1, 1}, {0, 1}}), Matrix::identity(2));
  EXPECT_THROW(hadamard(m, Matrix(3, 2)), DimensionMismatch);
}

TEST(Hadamard, CommutativeAndAssociative) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const Matrix a = random_nonnegative(rng, n), b = random_nonnegative(rng, n), c = random_nonnegative(rng, n);
    EXPECT_LE(max_abs_diff(hadamard(a, b), hadamard(b, a)), 1e-12);
    EXPECT_LE(max_abs_diff(hadamard(hadamard(a, b), c), hadamard(a, hadamard(b, c))), 1e-12);
  }
}

TEST(Stochasticity, Examples) {
  EXPECT_EQ(classify_stochasticity(Matrix{{0.5, 0.5}, {0.2, 0.8}}).kind, StochasticKind::stochastic);
  EXPECT_EQ(classify_stochasticity(Matrix{{0.1, 0.4}, {0.1, 0.4}}).kind, StochasticKind::substochastic);
  EXPECT_EQ(classify_stochasticity(Matrix{{1.5, 0}, {0, 1}}).kind, StochasticKind::neither);
}

TEST(Stochasticity, ColumnAxisAndClamping) {
  const Matrix m{{0.5, 0.2}, {0.5, 0.8}};
  EXPECT_EQ(classify_stochasticity(m, 1e-9, Axis::cols).kind, StochasticKind::stochastic);
  EXPECT_EQ(classify_stochasticity(m, 1e-9, Axis::rows).kind, StochasticKind::neither);
  const StochasticityClass c = classify_stochasticity(Matrix{{-1e-12, 0.5}, {0.2, 0.3}});
  EXPECT_EQ(c.clamped, 1u);
  EXPECT_EQ(c.kind, StochasticKind::substochastic);
  EXPECT_THROW(classify_stochasticity(Matrix{{-0.1, 0.5}, {0.2, 0.3}}), ValidationError);
}

TEST(Neumann, Examples) {
  const Matrix m{{0.1, 0.4}, {0.1, 0.4}};
  EXPECT_EQ(neumann_partial_sum(m, 0), Matrix::identity(2));
  EXPECT_LE(max_abs_diff(neumann_partial_sum(m, 60), Matrix{{1.2, 0.8}, {0.2, 1.8}}), 1e-9);
  EXPECT_LE(max_abs_diff(neumann_partial_sum(m, 60), lu_invert(Matrix::identity(2) - m)), 1e-9);
  EXPECT_EQ(neumann_partial_sum(Matrix{{0, 1}, {0, 0}}, 1), (Matrix{{1, 1}, {0, 1}}));
}

TEST(Neumann, AgreesWithInverseOnRandomSubstochastic) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const Matrix m = random_substochastic(rng, n, 0.9);
    EXPECT_LE(max_abs_diff(neumann_partial_sum(m, 400), lu_invert(Matrix::identity(n) - m)), 1e-8);
  }
}
