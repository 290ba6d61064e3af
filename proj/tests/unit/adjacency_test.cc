#include <gtest/gtest.h>

#include <random>

#include "gcnalign/adjacency.h"
#include "gcnalign/error.h"
#include "oracles.h"

namespace gcnalign {
namespace {

KnowledgeGraph graph(std::size_t n, std::size_t m, std::vector<Triple> triples) {
  KnowledgeGraph g;
  g.entity_count = n;
  g.relation_count = m;
  g.triples = std::move(triples);
  return g;
}

TEST(Functionality, TwoThirdsExample) {
  // a=0, b=1, c=2, d=3
  const auto w = compute_functionality(graph(4, 1, {{0, 0, 1}, {0, 0, 2}, {3, 0, 1}}));
  EXPECT_DOUBLE_EQ(w.fun[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w.ifun[0], 2.0 / 3.0);
}

TEST(Functionality, SingleTripleIsOne) {
  const auto w = compute_functionality(graph(2, 1, {{0, 0, 1}}));
  EXPECT_EQ(w.fun[0], 1.0);
  EXPECT_EQ(w.ifun[0], 1.0);
}

TEST(Functionality, ClampRaisesLowScores) {
  // ten triples from one head: fun = 0.1
  std::vector<Triple> t;
  for (int i = 1; i <= 10; ++i) t.push_back({0, 0, i});
  const auto w = compute_functionality(graph(11, 1, t));
  EXPECT_DOUBLE_EQ(w.fun[0], 0.1);
  const auto c = w.clamped();
  EXPECT_DOUBLE_EQ(c.fun[0], 0.3);
  EXPECT_DOUBLE_EQ(c.ifun[0], 1.0);
}

TEST(Functionality, UnusedRelationThrows) {
  EXPECT_THROW(compute_functionality(graph(2, 2, {{0, 0, 1}})), Error);
}

TEST(BuildAdjacency, NoTriplesGivesIdentity) {
  const auto a = build_adjacency(graph(3, 0, {}), AdjacencyConfig{});
  EXPECT_EQ(a.to_dense(), DenseMatrix::identity(3));
}

TEST(BuildAdjacency, OneTripleCountVariant) {
  AdjacencyConfig cfg;
  cfg.variant = AdjacencyVariant::kCount;
  const auto a = unnormalized_adjacency(graph(2, 1, {{0, 0, 1}}), cfg);
  EXPECT_EQ(a.to_dense(), DenseMatrix(2, 2, {1, 1, 1, 1}));
}

TEST(BuildAdjacency, OneTripleFunctionalityVariantMatchesCount) {
  AdjacencyConfig cfg;
  cfg.variant = AdjacencyVariant::kFunctionality;
  const auto a = unnormalized_adjacency(graph(2, 1, {{0, 0, 1}}), cfg);
  EXPECT_EQ(a.to_dense(), DenseMatrix(2, 2, {1, 1, 1, 1}));
}

TEST(BuildAdjacency, DuplicateTriplesAreCounted) {
  const auto a = count_adjacency(graph(2, 1, {{0, 0, 1}, {0, 0, 1}, {1, 0, 0}}));
  EXPECT_EQ(a.at(0, 1), 3.0);
  EXPECT_EQ(a.at(1, 0), 3.0);
}

TEST(BuildAdjacency, FunctionalityWeightsDirections) {
  // (0, r, 1) once: fun = ifun = 1 for r0. Relation 1 from one head to two
  // tails: fun = 1/2, ifun = 1.
  const KnowledgeGraph g = graph(3, 2, {{0, 0, 1}, {2, 1, 0}, {2, 1, 1}});
  RelationWeights w = compute_functionality(g);
  const auto a = functionality_adjacency(g, w);
  EXPECT_DOUBLE_EQ(a.at(2, 0), w.ifun[1]);  // (e_2, r1, e_0)
  EXPECT_DOUBLE_EQ(a.at(0, 2), w.fun[1]);   // reverse edge
  EXPECT_DOUBLE_EQ(a.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a.at(1, 2), 0.5);
}

TEST(AdjacencyProperty, UnitFunctionalityEqualsSymmetrizedCounts) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const KnowledgeGraph g = testing::random_graph(12, 3, 30, rng);
    RelationWeights ones{std::vector<double>(3, 1.0), std::vector<double>(3, 1.0), 0.3};
    const DenseMatrix f = functionality_adjacency(g, ones).to_dense();
    const DenseMatrix c = count_adjacency(g).to_dense();
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_NEAR(f.values()[i], c.values()[i], 1e-12);
    }
  }
}

TEST(AdjacencyProperty, PositiveDiagonalAndRowSums) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const KnowledgeGraph g = testing::random_graph(15, 4, 25, rng);
    for (auto variant : {AdjacencyVariant::kCount, AdjacencyVariant::kFunctionality}) {
      AdjacencyConfig cfg;
      cfg.variant = variant;
      const auto raw = unnormalized_adjacency(g, cfg);
      for (std::size_t i = 0; i < g.entity_count; ++i) EXPECT_GT(raw.at(i, i), 0.0);
      for (double s : build_adjacency(g, cfg).row_sums()) EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(AdjacencyProperty, ClampingNeverDecreasesEntries) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const KnowledgeGraph g = testing::random_graph(10, 2, 40, rng);
    AdjacencyConfig on, off;
    on.variant = off.variant = AdjacencyVariant::kFunctionality;
    off.clamp = false;
    const DenseMatrix a = unnormalized_adjacency(g, on).to_dense();
    const DenseMatrix b = unnormalized_adjacency(g, off).to_dense();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_GE(a.values()[i], b.values()[i]);
    const auto clamped = compute_functionality(g).clamped();
    for (double v : clamped.fun) EXPECT_GE(v, 0.3);
    for (double v : clamped.ifun) EXPECT_GE(v, 0.3);
  }
}

}  // namespace
}  // namespace gcnalign
