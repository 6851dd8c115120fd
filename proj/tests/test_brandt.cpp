#include <gtest/gtest.h>

#include "ssg/brandt.hpp"

using namespace ssg;

namespace {

RationalMatrix rat(const std::vector<std::vector<long>>& m) {
  RationalMatrix out;
  for (const auto& row : m) {
    out.emplace_back();
    for (long x : row) out.back().push_back(x);
  }
  return out;
}

RationalMatrix identity(std::size_t n) {
  RationalMatrix m(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

}  // namespace

TEST(Brandt, GenusTwoReferenceValuesForFive) {
  auto cs = class_set(5, 2, 2);
  const std::vector<std::pair<i64, std::vector<std::vector<long>>>> table{
      {2, {{12, 3}, {10, 5}}}, {3, {{34, 6}, {20, 20}}}, {7, {{322, 78}, {260, 140}}}};
  for (const auto& [ell, ref] : table) {
    auto b = brandt_matrix(cs, ell);
    EXPECT_TRUE(permutation_similarity(b.m, rat(ref)).has_value()) << "ell=" << ell;
    EXPECT_TRUE(row_sum_check(b).ok);
    EXPECT_TRUE(weighted_symmetric(b));
  }
}

TEST(Brandt, GenusThreeReferenceValueForFive) {
  auto cs = class_set(5, 3, 2);
  auto b = brandt_matrix(cs, 2, 4);
  EXPECT_TRUE(permutation_similarity(b.m, rat({{54, 27, 54}, {30, 15, 90}, {14, 21, 100}})).has_value());
  EXPECT_EQ(row_sum_check(b).expected, 135);
}

TEST(Brandt, ZeroLevelColumns) {
  auto cs = class_set(5, 2, 2);
  auto b = brandt_zero(cs);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(b.m[i][j], ratio(1, cs.classes[j].e));
}

TEST(Brandt, LevelOneIsIdentity) {
  for (auto [p, g] : std::vector<std::pair<long, std::size_t>>{{11, 1}, {13, 1}, {7, 2}}) {
    auto cs = class_set(p, g, 2);
    if (g == 1) EXPECT_EQ(brandt_matrix(cs, 1).m, identity(cs.h()));
  }
}

TEST(Brandt, RejectsCompositeLevelInHigherGenus) {
  auto cs = class_set(5, 2, 2);
  EXPECT_THROW(brandt_matrix(cs, 4), std::invalid_argument);
  EXPECT_THROW(brandt_matrix(cs, 5), std::invalid_argument);
}

TEST(Brandt, HeckeRelationsInGenusOne) {
  // B(l)^2 = B(l^2) + l B(1) for l != p, and Brandt matrices commute.
  for (long p : {11L, 13L, 23L}) {
    auto cs = class_set(p, 1, 2);
    auto b2 = brandt_matrix(cs, 2), b3 = brandt_matrix(cs, 3), b4 = brandt_matrix(cs, 4), b9 = brandt_matrix(cs, 9);
    auto sq2 = multiply(b2.m, b2.m), sq3 = multiply(b3.m, b3.m);
    auto id = identity(cs.h());
    for (std::size_t i = 0; i < cs.h(); ++i)
      for (std::size_t j = 0; j < cs.h(); ++j) {
        EXPECT_EQ(sq2[i][j], b4.m[i][j] + 2 * id[i][j]);
        EXPECT_EQ(sq3[i][j], b9.m[i][j] + 3 * id[i][j]);
      }
    EXPECT_EQ(multiply(b2.m, b3.m), multiply(b3.m, b2.m));
    EXPECT_EQ(multiply(b2.m, b3.m), brandt_matrix(cs, 6).m);
  }
}

TEST(Brandt, ClassicalIdealFormulaAgrees) {
  for (long p : {2L, 5L, 11L, 13L}) {
    auto o = make_order(p);
    auto ideals = ideal_classes(*o, p == 2 ? 3 : 2);
    auto cs = class_set(p, 1, p == 2 ? 3 : 2);
    ASSERT_EQ(ideals.size(), cs.h());
    std::vector<std::size_t> perm;
    for (const auto& I : ideals) perm.push_back(identify(cs, HermitianLattice::ideal(o, I.basis))->index);
    for (i64 n = 1; n <= 8; ++n) {
      auto a = brandt_g1_classical(*o, ideals, n), b = brandt_matrix(cs, n);
      for (std::size_t i = 0; i < cs.h(); ++i)
        for (std::size_t j = 0; j < cs.h(); ++j) EXPECT_EQ(a.m[i][j], b.m[perm[i]][perm[j]]) << p << " n=" << n;
    }
  }
}

TEST(Brandt, IdealsAreRightModules) {
  auto o = make_order(13);
  for (const auto& I : ideal_classes(*o, 2))
    for (const auto& x : I.basis)
      for (const auto& y : o->basis()) {
        Quaternion z = o->algebra().mul(x, y);
        auto id = ideal_from_generators(*o, {I.basis[0], I.basis[1], I.basis[2], I.basis[3], z});
        EXPECT_EQ(id.norm, I.norm);
      }
}

TEST(Brandt, PermutationSimilarity) {
  auto a = rat({{1, 2, 0}, {3, 4, 5}, {0, 6, 7}});
  auto b = rat({{7, 0, 6}, {0, 1, 2}, {5, 3, 4}});  // order (2, 0, 1)
  auto s = permutation_similarity(a, b);
  ASSERT_TRUE(s.has_value());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a[(*s)[i]][(*s)[j]], b[i][j]);
  EXPECT_FALSE(permutation_similarity(a, rat({{1, 2, 0}, {3, 4, 5}, {0, 7, 6}})).has_value());
}

TEST(Brandt, JsonUsesStrings) {
  auto b = brandt_matrix(class_set(5, 2, 2), 2);
  auto j = to_json(b);
  EXPECT_TRUE(j["p"].is_string());
  EXPECT_TRUE(j["matrix"][0][0].is_string());
  EXPECT_EQ(j["row_sum"], "15");
  EXPECT_EQ(to_csv(b).substr(0, 1).empty(), false);
}
