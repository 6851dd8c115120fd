#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "ssg/lattice.hpp"

using namespace ssg;

namespace {

// Random positive-definite doubled Gram: 2 (A^T A) + 2 I.
IntMatrix random_doubled(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<i64> d(-2, 2);
  IntMatrix a(n, n);
  for (auto& x : a.data) x = d(rng);
  IntMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      i64 s = i == j ? 1 : 0;
      for (std::size_t k = 0; k < n; ++k) s += a(k, i) * a(k, j);
      t(i, j) = 2 * s;
    }
  return t;
}

std::vector<std::vector<i64>> rows_of(const IntMatrix& m) {
  std::vector<std::vector<i64>> r;
  for (std::size_t i = 0; i < m.rows; ++i) r.push_back(m.row(i));
  return r;
}

}  // namespace

TEST(GramForm, RejectsIndefiniteAndOddDiagonal) {
  EXPECT_FALSE(GramForm(IntMatrix::from_rows({{2, 3}, {3, 2}})).is_positive_definite());
  EXPECT_TRUE(GramForm(IntMatrix::from_rows({{2, 1}, {1, 2}})).is_positive_definite());
  EXPECT_THROW(GramForm(IntMatrix::from_rows({{1, 0}, {0, 2}})), std::invalid_argument);
}

TEST(ShortVectors, MatchBoxSearch) {
  std::mt19937 rng(3);
  for (int t = 0; t < 25; ++t) {
    std::size_t n = 2 + t % 4;
    IntMatrix d = random_doubled(rng, n);
    GramForm q(d);
    for (i64 v = 1; v <= 6; ++v) {
      auto got = short_vectors(q, v).vectors;
      auto want = oracle::box_vectors(rows_of(d), v);
      std::sort(want.begin(), want.end());
      EXPECT_EQ(got, want) << "trial " << t << " value " << v;
    }
  }
}

TEST(ShortVectors, UpToIsSortedUnion) {
  std::mt19937 rng(5);
  IntMatrix d = random_doubled(rng, 4);
  GramForm q(d);
  auto all = vectors_up_to(q, 5);
  std::size_t total = 0;
  for (i64 v = 1; v <= 5; ++v) total += short_vectors(q, v).vectors.size();
  EXPECT_EQ(all.size(), total);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), [&](const IntVector& a, const IntVector& b) { return q.value(a) < q.value(b); }));
}

TEST(AffineVectors, MatchFilteredBox) {
  // x = (1, 0, 0) + z1 (0, 2, 0) + z2 (0, 0, 1) on the A3 root lattice
  IntMatrix d = IntMatrix::from_rows({{4, -2, 0}, {-2, 4, -2}, {0, -2, 4}});
  GramForm q(d);
  IntMatrix kernel = IntMatrix::from_columns({{0, 2, 0}, {0, 0, 1}});
  for (i64 v = 1; v <= 8; ++v) {
    auto got = affine_vectors(q, {1, 0, 0}, kernel, v);
    std::sort(got.begin(), got.end());
    std::vector<IntVector> want;
    for (const auto& x : oracle::box_vectors(rows_of(d), v))
      if (x[0] == 1 && x[1] % 2 == 0) want.push_back(x);
    EXPECT_EQ(got, want) << v;
  }
}

TEST(Lll, SameLatticeSameDeterminant) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<i64> d(-4, 4);
  for (int t = 0; t < 20; ++t) {
    IntMatrix g = random_doubled(rng, 4);
    GramForm q(g);
    IntMatrix basis(4, 4);
    do {
      for (auto& x : basis.data) x = d(rng);
    } while (determinant(basis) == 0);
    IntMatrix red = lll_reduce(q, basis);
    EXPECT_EQ(abs(determinant(red)), abs(determinant(basis)));
    for (std::size_t c = 0; c < 4; ++c) EXPECT_TRUE(solve_integer_system(basis, red.column(c)).has_value());
    // first vector is no longer than the shortest input column
    i64 shortest = q.value(basis.column(0));
    for (std::size_t c = 1; c < 4; ++c) shortest = std::min(shortest, q.value(basis.column(c)));
    EXPECT_LE(q.value(red.column(0)), shortest);
  }
}

TEST(IntMatrix, IntegerSystemSolutionsAreComplete) {
  IntMatrix a = IntMatrix::from_rows({{2, 4, 6}, {1, 3, 5}});
  auto sol = solve_integer_system(a, {2, 2});
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(a * sol->particular, (IntVector{2, 2}));
  ASSERT_EQ(sol->kernel.cols, 1u);
  EXPECT_EQ(a * sol->kernel.column(0), (IntVector{0, 0}));
  EXPECT_FALSE(solve_integer_system(a, {1, 0}).has_value());
}

TEST(IntMatrix, RrefModAndScaledInverse) {
  IntMatrix m = IntMatrix::from_rows({{1, 2, 3}, {2, 4, 6}, {0, 1, 1}});
  IntMatrix r = rref_mod(m, 5);
  EXPECT_EQ(r, IntMatrix::from_rows({{1, 0, 1}, {0, 1, 1}}));
  IntMatrix b = IntMatrix::from_rows({{2, 1}, {0, 3}});
  IntMatrix inv = scaled_inverse(b, 6);
  EXPECT_EQ(b * inv, IntMatrix::from_rows({{6, 0}, {0, 6}}));
  EXPECT_THROW(scaled_inverse(b, 1), std::logic_error);
}

TEST(IntMatrix, OverflowIsDetected) {
  EXPECT_THROW(checked_mul(i64(1) << 40, i64(1) << 40), std::overflow_error);
}

TEST(ConstrainedSearch, OrthogonalFramesOfZ3) {
  // columns of signed permutation matrices: 48 orthogonal frames
  MatrixSearchProblem prob{GramForm(IntMatrix::from_rows({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}})), {1, 1, 1}, {}};
  IntMatrix id2 = IntMatrix::from_rows({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) prob.constraints.push_back({i, j, id2, 0});
  EXPECT_EQ(constrained_matrix_search(prob).size(), 48u);
}
