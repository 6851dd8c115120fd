#include <gtest/gtest.h>

#include "ssg/graphs.hpp"

using namespace ssg;

namespace {

struct Fixture {
  PolarizedClassSet cs;
  IsogenyData data;
  WeightedGraph big, little;
  EnhancedGraph enhanced;
  Fixture(long p, std::size_t g, i64 ell) : cs(class_set(p, g, p == 2 ? 3 : 2)) {
    data = isogeny_data(cs, ell);
    big = build_big(data);
    little = build_little(data);
    enhanced = build_enhanced(little);
  }
};

RationalMatrix antidiag(const RationalMatrix& a) {
  const std::size_t h = a.size();
  RationalMatrix out(2 * h, std::vector<Rational>(2 * h, 0));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) out[i][h + j] = out[h + i][j] = a[i][j];
  return out;
}

}  // namespace

TEST(Graphs, AdjacencyIdentities) {
  for (auto [p, g, ell] : std::vector<std::tuple<long, std::size_t, i64>>{{5, 2, 2}, {5, 2, 3}, {11, 1, 3}, {13, 2, 2}, {2, 2, 3}}) {
    Fixture f(p, g, ell);
    auto b = brandt_matrix(f.cs, ell);
    EXPECT_EQ(f.big.adjacency(), b.m);
    EXPECT_EQ(f.little.weighted_adjacency(), b.m);
    auto a = f.little.adjacency();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(a[i][j], a[j][i]);
    EXPECT_EQ(f.enhanced.graph.adjacency(), antidiag(a));
    EXPECT_EQ(f.enhanced.graph.weighted_adjacency(), antidiag(b.m));
    EXPECT_TRUE(check_axioms(f.little).ok) << check_axioms(f.little).detail;
    EXPECT_TRUE(check_axioms(f.enhanced.graph).ok);
    EXPECT_TRUE(check_double_cover(f.enhanced, f.little).ok) << check_double_cover(f.enhanced, f.little).detail;
    EXPECT_TRUE(is_connected(f.big));
    EXPECT_TRUE(is_connected(f.enhanced.graph));
  }
}

TEST(Graphs, BigGraphHasOneEdgePerKernel) {
  Fixture f(5, 2, 2);
  EXPECT_EQ(f.big.edges.size(), 2 * 15u);
  EXPECT_FALSE(f.big.has_opposites);
  for (std::size_t i = 0; i < f.data.classes.size(); ++i) {
    std::size_t total = 0;
    for (const auto& o : f.data.classes[i].orbits) total += o.size;
    EXPECT_EQ(total, 15u);
  }
}

TEST(Graphs, OppositesAreInvolutive) {
  Fixture f(13, 2, 2);
  const auto& es = f.little.edges;
  for (std::size_t k = 0; k < es.size(); ++k) {
    ASSERT_TRUE(es[k].opposite.has_value());
    std::size_t o = *es[k].opposite;
    EXPECT_EQ(*es[o].opposite, k);
    EXPECT_EQ(es[o].origin, es[k].terminus);
    EXPECT_EQ(es[o].weight, es[k].weight);
  }
  for (std::size_t k = 0; k < f.enhanced.graph.edges.size(); ++k) EXPECT_FALSE(f.enhanced.graph.is_half_edge(k));
}

TEST(Graphs, StripHalfEdges) {
  Fixture f(5, 2, 3);
  std::size_t half = f.little.half_edge_count();
  auto s = strip_half_edges(f.little);
  EXPECT_EQ(s.edges.size(), f.little.edges.size() - half);
  EXPECT_EQ(s.half_edge_count(), 0u);
  EXPECT_TRUE(check_axioms(s).ok);
}

TEST(Graphs, AxiomViolationsAreReported) {
  WeightedGraph g;
  g.kind = "test";
  g.vertex_weight = {4, 6};
  g.has_opposites = true;
  g.edges = {{0, 1, 1, 2, 2}, {1, 0, 0, 3, 3}};  // weights differ on opposite edges
  EXPECT_FALSE(check_axioms(g).ok);
  g.edges = {{0, 1, 1, 3, 3}, {1, 0, 0, 3, 3}};  // 3 does not divide 4
  EXPECT_FALSE(check_axioms(g).ok);
  g.edges = {{0, 0, 0, 2, 2}};
  g.allows_half_edges = false;
  EXPECT_FALSE(check_axioms(g).ok);
  g.allows_half_edges = true;
  EXPECT_TRUE(check_axioms(g).ok);
  EXPECT_FALSE(is_connected(g));
}

TEST(Graphs, Serialization) {
  Fixture f(5, 2, 2);
  std::string dot = to_dot(f.little);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("e=72"), std::string::npos);
  auto j = to_json(f.enhanced);
  EXPECT_TRUE(j.is_object());
  EXPECT_TRUE(to_json(f.big)["adjacency"][0][0].is_string());
}
