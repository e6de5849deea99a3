#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hcurl/linalg.hpp"
#include "oracles.hpp"

using namespace hcurl;

namespace {

struct RandomSparse {
  std::vector<Triplet> triplets;
  oracle::Dense dense;
};

RandomSparse random_sparse(std::size_t rows, std::size_t cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> r(0, rows - 1), c(0, cols - 1);
  RandomSparse out{{}, oracle::Dense(rows, std::vector<double>(cols, 0.0))};
  for (std::size_t k = 0; k < 3 * rows; ++k) {
    const Triplet t{r(rng), c(rng), val(rng)};
    out.triplets.push_back(t);
    out.dense[t.row][t.col] += t.value;
  }
  return out;
}

SparseMatrix to_sparse(const oracle::Dense& a) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
    }
  }
  return SparseMatrix::from_triplets(a.size(), a.empty() ? 0 : a[0].size(), t);
}

}  // namespace

TEST(SparseMatrix, DuplicatesAreSummed) {
  const auto m = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}});
  EXPECT_EQ(m.nonzeros(), 1u);
  EXPECT_EQ(m(0, 0), 3.0);
}

TEST(SparseMatrix, EmptyTripletsGiveZeroMatrix) {
  const auto m = SparseMatrix::from_triplets(2, 2, {});
  EXPECT_EQ(m.nonzeros(), 0u);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(m(i, j), 0.0);
  }
  const Vector y = spmv(m, Vector{1.0, 2.0});
  EXPECT_EQ(y, (Vector{0.0, 0.0}));
}

TEST(SparseMatrix, RowsAreSortedAndUnique) {
  std::mt19937 rng(3);
  const auto rs = random_sparse(20, 15, rng);
  const auto m = SparseMatrix::from_triplets(20, 15, rs.triplets);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t k = m.row_ptr()[r] + 1; k < m.row_ptr()[r + 1]; ++k) {
      EXPECT_LT(m.col_idx()[k - 1], m.col_idx()[k]);
    }
  }
}

TEST(SparseMatrix, PermutationInvariantBitwise) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    // Many duplicates with values of mixed magnitude, so summation order matters.
    std::vector<Triplet> t;
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-20, 20);
    std::uniform_int_distribution<std::size_t> idx(0, 3);
    for (int k = 0; k < 200; ++k) t.push_back({idx(rng), idx(rng), std::ldexp(val(rng), ex(rng))});
    const auto a = SparseMatrix::from_triplets(4, 4, t);
    std::shuffle(t.begin(), t.end(), rng);
    const auto b = SparseMatrix::from_triplets(4, 4, t);
    ASSERT_TRUE(std::equal(a.row_ptr().begin(), a.row_ptr().end(), b.row_ptr().begin()));
    ASSERT_TRUE(std::equal(a.col_idx().begin(), a.col_idx().end(), b.col_idx().begin()));
    for (std::size_t k = 0; k < a.nonzeros(); ++k) EXPECT_EQ(a.values()[k], b.values()[k]);
  }
}

TEST(SparseMatrix, RejectsOutOfRangeTriplet) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{0, 5, 1.0}}), DimensionError);
}

TEST(Spmv, SmallExamples) {
  EXPECT_EQ(spmv(SparseMatrix::identity(3), Vector{1.0, -2.0, 5.0}), (Vector{1.0, -2.0, 5.0}));
  const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {1, 1, 3.0}});
  EXPECT_EQ(spmv(a, Vector{1.0, 1.0}), (Vector{2.0, 3.0}));
}

TEST(Spmv, MatchesDenseOracle) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (std::size_t n : {1u, 3u, 10u, 27u, 50u}) {
    const auto rs = random_sparse(n, n, rng);
    const auto a = SparseMatrix::from_triplets(n, n, rs.triplets);
    Vector x(n);
    for (auto& v : x) v = val(rng);
    const Vector y = spmv(a, x);
    const Vector ref = oracle::dense_matvec(rs.dense, x);
    const double scale = std::max(1.0, *std::max_element(ref.begin(), ref.end(),
                                                         [](double p, double q) { return std::abs(p) < std::abs(q); }));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], ref[i], 1e-14 * std::abs(scale));
  }
}

TEST(Spmv, DimensionMismatch) {
  const auto a = SparseMatrix::identity(3);
  EXPECT_THROW(spmv(a, Vector{1.0, 2.0}), DimensionError);
}

TEST(Cg, IdentityConvergesImmediately) {
  const Vector b{1.0, 2.0, 3.0};
  const auto res = cg_solve(SparseMatrix::identity(3), b, 1e-12, 10);
  EXPECT_LE(res.iterations, 1u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(res.x[i], b[i]);
}

TEST(Cg, ZeroRightHandSide) {
  const auto res = cg_solve(to_sparse(oracle::poisson5(4)), Vector(16, 0.0), 1e-12, 100);
  EXPECT_EQ(res.iterations, 0u);
  for (double v : res.x) EXPECT_EQ(v, 0.0);
}

TEST(Cg, PoissonMatchesDenseOracle) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int m : {4, 10, 14}) {
    const oracle::Dense dense = oracle::poisson5(m);
    const auto a = to_sparse(dense);
    Vector b(static_cast<std::size_t>(m * m));
    for (auto& v : b) v = val(rng);
    const auto res = cg_solve(a, b, 1e-12, 20 * b.size());
    const Vector ref = oracle::dense_solve(dense, b);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      err = std::max(err, std::abs(res.x[i] - ref[i]));
      scale = std::max(scale, std::abs(ref[i]));
    }
    EXPECT_LE(err, 1e-10 * scale) << "m=" << m;
    // residual contract
    const Vector ax = spmv(a, res.x);
    double r = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) r += (b[i] - ax[i]) * (b[i] - ax[i]);
    EXPECT_LE(std::sqrt(r), 1e-12 * norm2(b));
    EXPECT_NEAR(res.residual, std::sqrt(r) / norm2(b), 1e-15);
  }
}

TEST(Cg, RandomSpdMatchesDenseOracle) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const std::size_t n = 200;
  // Diagonally dominant symmetric matrix with a random sparse pattern.
  oracle::Dense dense(n, std::vector<double>(n, 0.0));
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  for (int k = 0; k < 800; ++k) {
    const std::size_t i = idx(rng), j = idx(rng);
    if (i == j) continue;
    const double v = val(rng);
    dense[i][j] += v;
    dense[j][i] += v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(dense[i][j]);
    dense[i][i] = s + 0.5 + val(rng) * 0.25;
  }
  Vector b(n);
  for (auto& v : b) v = val(rng);
  const auto res = cg_solve(to_sparse(dense), b, 1e-13, 20 * n);
  const Vector ref = oracle::dense_solve(dense, b);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(res.x[i], ref[i], 1e-10);
}

TEST(Cg, NonConvergenceReportsResidual) {
  const auto a = to_sparse(oracle::poisson5(10));
  const Vector b(100, 1.0);
  try {
    cg_solve(a, b, 1e-12, 3);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.iterations, 3u);
    EXPECT_GT(e.achieved_residual, 1e-12);
  }
}

TEST(Cg, RejectsNonPositiveDiagonal) {
  const auto a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 0.0}, {0, 1, 0.5}, {1, 0, 0.5}});
  EXPECT_THROW(cg_solve(a, Vector{1.0, 1.0}, 1e-12, 10), SolverError);
  const auto neg = SparseMatrix::from_triplets(1, 1, {{0, 0, -1.0}});
  EXPECT_THROW(cg_solve(neg, Vector{1.0}, 1e-12, 10), SolverError);
}

TEST(Cg, RejectsBadArguments) {
  EXPECT_THROW(cg_solve(SparseMatrix::identity(2), Vector{1.0}, 1e-12, 10), DimensionError);
  EXPECT_THROW(cg_solve(SparseMatrix::identity(2), Vector{1.0, 1.0}, 0.0, 10), std::invalid_argument);
}

TEST(Cg, BackwardErrorOfHandExample) {
  // A = [[2, -1], [-1, 2]], x = (1, 1), b = (1, 2): r = (0, 1),
  // (|A||x| + |b|) = (4, 5).
  const auto a = to_sparse({{2.0, -1.0}, {-1.0, 2.0}});
  const Vector x{1.0, 1.0}, b{1.0, 2.0}, r{0.0, 1.0};
  EXPECT_DOUBLE_EQ(componentwise_backward_error(a, x, b, r), 0.2);
}

TEST(Cg, BackwardToleranceAcceptsAtRoundingFloor) {
  // A relative residual of 1e-30 is out of reach in double precision.
  const auto a = to_sparse(oracle::poisson5(8));
  const Vector b(64, 1.0);
  EXPECT_THROW(cg_solve(a, b, 1e-30, 200), SolverError);
  const auto res = cg_solve(a, b, 1e-30, 200, 1e-13);
  EXPECT_LE(res.backward_error, 1e-13);
  const Vector ref = oracle::dense_solve(oracle::poisson5(8), b);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(res.x[i], ref[i], 1e-12 * std::abs(ref[i]) + 1e-14);
}
