#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "gcnalign/error.h"
#include "gcnalign/linalg.h"
#include "oracles.h"

namespace gcnalign {
namespace {

using testing::dense_product;
using testing::random_dense;

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                           std::mt19937_64& rng) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<CooEntry> entries;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (keep(rng)) {
        entries.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), u(rng)});
      }
    }
  }
  return SparseMatrix::from_triplets(rows, cols, entries);
}

double max_relative(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a.values()[i]), std::abs(b.values()[i])});
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]) / scale);
  }
  return worst;
}

TEST(Spmm, IdentityTimesMatrixIsMatrix) {
  std::mt19937_64 rng(1);
  const DenseMatrix b = random_dense(4, 3, rng);
  EXPECT_EQ(spmm(SparseMatrix::identity(4), b), b);
}

TEST(Spmm, AllOnes) {
  const std::vector<CooEntry> ones = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  const auto a = SparseMatrix::from_triplets(2, 2, ones);
  const DenseMatrix out = spmm(a, DenseMatrix(2, 1, {1.0, 3.0}));
  EXPECT_EQ(out, DenseMatrix(2, 1, {4.0, 4.0}));
}

TEST(Spmm, DimensionMismatchThrows) {
  EXPECT_THROW(spmm(SparseMatrix::identity(3), DenseMatrix(2, 2)), Error);
}

TEST(Spmm, AgreesWithDenseProductOnRandomInstances) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 50);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = dim(rng), m = dim(rng), k = dim(rng);
    const SparseMatrix a = random_sparse(n, m, 0.2, rng);
    const DenseMatrix b = random_dense(m, k, rng);
    EXPECT_LE(max_relative(spmm(a, b), dense_product(a.to_dense(), b)), 1e-10);
  }
}

TEST(Spmm, FiveByFiveExample) {
  std::mt19937_64 rng(5);
  const SparseMatrix a = random_sparse(5, 5, 0.5, rng);
  const DenseMatrix b = random_dense(5, 3, rng);
  EXPECT_LE(max_relative(spmm(a, b), dense_product(a.to_dense(), b)), 1e-12);
}

TEST(Spmm, TransposedProductMatchesExplicitTranspose) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix a = random_sparse(13, 9, 0.3, rng);
    const DenseMatrix b = random_dense(13, 4, rng);
    EXPECT_LE(max_relative(spmm_transposed(a, b), spmm(a.transpose(), b)), 1e-12);
  }
}

TEST(Spmm, RepeatedCallsAreBitwiseIdentical) {
  std::mt19937_64 rng(9);
  const SparseMatrix a = random_sparse(40, 40, 0.1, rng);
  const DenseMatrix b = random_dense(40, 8, rng);
  EXPECT_EQ(spmm(a, b), spmm(a, b));
}

TEST(DenseProducts, MatchOracle) {
  std::mt19937_64 rng(10);
  const DenseMatrix a = random_dense(6, 4, rng);
  const DenseMatrix b = random_dense(4, 5, rng);
  const DenseMatrix c = random_dense(6, 5, rng);
  EXPECT_LE(max_relative(matmul(a, b), dense_product(a, b)), 1e-12);
  // a^T c and c b^T
  DenseMatrix at(4, 6), bt(5, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) at(j, i) = a(i, j);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) bt(j, i) = b(i, j);
  EXPECT_LE(max_relative(matmul_tn(a, c), dense_product(at, c)), 1e-12);
  EXPECT_LE(max_relative(matmul_nt(c, b), dense_product(c, bt)), 1e-12);
}

TEST(Csr, ShuffledDuplicatesEqualPresummedSorted) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> coord(0, 9);
  std::uniform_int_distribution<int> small(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<CooEntry> raw;
    for (int i = 0; i < 60; ++i) raw.push_back({coord(rng), coord(rng), double(small(rng))});
    std::map<std::pair<std::int64_t, std::int64_t>, double> summed;
    for (const auto& e : raw) summed[{e.row, e.col}] += e.value;
    std::vector<CooEntry> sorted;
    for (const auto& [rc, v] : summed) sorted.push_back({rc.first, rc.second, v});
    std::shuffle(raw.begin(), raw.end(), rng);
    EXPECT_EQ(SparseMatrix::from_triplets(10, 10, raw),
              SparseMatrix::from_triplets(10, 10, sorted));
  }
}

TEST(Csr, CanonicalFormInvariants) {
  std::mt19937_64 rng(4);
  const SparseMatrix a = random_sparse(20, 15, 0.3, rng);
  const auto offsets = a.row_offsets();
  ASSERT_EQ(offsets.size(), 21u);
  EXPECT_EQ(offsets.back(), static_cast<std::int64_t>(a.values().size()));
  EXPECT_EQ(a.col_indices().size(), a.values().size());
  for (std::size_t r = 0; r < 20; ++r) {
    EXPECT_LE(offsets[r], offsets[r + 1]);
    for (auto k = offsets[r] + 1; k < offsets[r + 1]; ++k) {
      EXPECT_LT(a.col_indices()[k - 1], a.col_indices()[k]);
    }
  }
}

TEST(Csr, OutOfRangeTripletThrows) {
  const std::vector<CooEntry> bad = {{0, 3, 1.0}};
  EXPECT_THROW(SparseMatrix::from_triplets(2, 3, bad), Error);
}

TEST(Csr, AtAndTranspose) {
  const std::vector<CooEntry> e = {{0, 2, 5.0}, {1, 0, -1.0}};
  const auto a = SparseMatrix::from_triplets(2, 3, e);
  EXPECT_EQ(a.at(0, 2), 5.0);
  EXPECT_EQ(a.at(0, 1), 0.0);
  const auto t = a.transpose();
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.at(2, 0), 5.0);
  EXPECT_EQ(t.at(0, 1), -1.0);
}

TEST(RowL2Normalize, ThreeFourFive) {
  const DenseMatrix out = row_l2_normalize(DenseMatrix(1, 2, {3.0, 4.0}));
  EXPECT_DOUBLE_EQ(out(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(out(0, 1), 0.8);
}

TEST(RowL2Normalize, ZeroRowUnchanged) {
  const DenseMatrix z(1, 2);
  EXPECT_EQ(row_l2_normalize(z), z);
}

TEST(RowL2Normalize, RandomRowsHaveUnitNorm) {
  std::mt19937_64 rng(12);
  const DenseMatrix out = row_l2_normalize(random_dense(30, 7, rng, -5, 5));
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double sq = 0.0;
    for (double v : out.row(r)) sq += v * v;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-6);
  }
}

TEST(DegreeNormalize, UniformTwoByTwo) {
  const std::vector<CooEntry> ones = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  const auto a = SparseMatrix::from_triplets(2, 2, ones);
  for (auto mode : {DegreeNormalization::kRow, DegreeNormalization::kSymmetric}) {
    const DenseMatrix d = degree_normalize(a, mode).to_dense();
    for (double v : d.values()) EXPECT_DOUBLE_EQ(v, 0.5);
  }
}

TEST(DegreeNormalize, IdentityIsFixedPoint) {
  const auto i = SparseMatrix::identity(4);
  EXPECT_EQ(degree_normalize(i, DegreeNormalization::kRow), i);
  EXPECT_EQ(degree_normalize(i, DegreeNormalization::kSymmetric), i);
}

TEST(DegreeNormalize, ZeroDegreeRowThrows) {
  const std::vector<CooEntry> e = {{0, 0, 1.0}};
  const auto a = SparseMatrix::from_triplets(2, 2, e);
  try {
    degree_normalize(a, DegreeNormalization::kRow);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.category(), ErrorCategory::kNumeric);
  }
}

TEST(DegreeNormalize, RowModeRowsSumToOne) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    SparseMatrix a = random_sparse(25, 25, 0.2, rng);
    // positive entries plus self-loops
    std::vector<CooEntry> e;
    for (std::size_t r = 0; r < 25; ++r) {
      e.push_back({std::int64_t(r), std::int64_t(r), 1.0});
      for (auto k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
        e.push_back({std::int64_t(r), a.col_indices()[k], std::abs(a.values()[k])});
      }
    }
    const auto n = degree_normalize(SparseMatrix::from_triplets(25, 25, e),
                                    DegreeNormalization::kRow);
    for (double s : n.row_sums()) EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(DegreeNormalize, SymmetricMatchesFormula) {
  const std::vector<CooEntry> e = {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 1}, {2, 2, 4}};
  const auto a = SparseMatrix::from_triplets(3, 3, e);
  const auto n = degree_normalize(a, DegreeNormalization::kSymmetric);
  // degrees 3, 3, 4
  EXPECT_NEAR(n.at(0, 1), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(n.at(2, 2), 1.0, 1e-15);
  EXPECT_NEAR(n.at(0, 0), 1.0 / 3.0, 1e-15);
}

}  // namespace
}  // namespace gcnalign
