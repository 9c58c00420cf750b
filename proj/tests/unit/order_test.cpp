#include "prefcon/order.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "prefcon/random.hpp"
#include "support/oracles.hpp"

namespace prefcon {
namespace {

using testing::Adjacency;

constexpr auto P = Preference::kFirst;
constexpr auto N = Preference::kSecond;
constexpr auto U = Preference::kUnresolved;

BinaryComparisonMatrix fill(std::size_t n, const std::function<Preference(std::size_t, std::size_t)>& f) {
  BinaryComparisonMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m.set(i, j, f(i, j));
    }
  }
  return m;
}

RelationMatrix from_adjacency(const Adjacency& adj) {
  RelationMatrix r(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (std::size_t j = 0; j < adj.size(); ++j) {
      if (adj[i][j]) r.add_edge(i, j);
    }
  }
  return r;
}

Adjacency to_adjacency(const BoolMatrix& m) {
  Adjacency adj(m.size(), std::vector<bool>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) adj[i][j] = m.at(i, j);
  }
  return adj;
}

Adjacency random_relation(SeededRng& rng, std::size_t n) {
  Adjacency adj(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      switch (rng.below(3)) {
        case 0: adj[i][j] = true; break;
        case 1: adj[j][i] = true; break;
        default: break;
      }
    }
  }
  return adj;
}

TEST(BinaryComparisonMatrix, DiagonalStaysUnresolved) {
  BinaryComparisonMatrix m(3);
  EXPECT_EQ(m.at(1, 1), U);
  EXPECT_THROW(m.set(1, 1, P), std::invalid_argument);
  EXPECT_NO_THROW(m.set(1, 1, U));
  EXPECT_THROW(m.set(3, 0, P), std::out_of_range);
  EXPECT_THROW(BinaryComparisonMatrix(1), std::invalid_argument);
}

TEST(Asymmetry, AlwaysFirstListedIsZero) {
  const auto m = fill(4, [](auto, auto) { return P; });
  const auto r = asymmetry_score(m);
  ASSERT_TRUE(r.has_signal());
  EXPECT_DOUBLE_EQ(*r.score, 0.0);
  EXPECT_EQ(r.resolved_pairs, 6u);
  EXPECT_EQ(r.total_pairs, 6u);
}

TEST(Asymmetry, AntisymmetricIsOne) {
  const auto m = fill(4, [](auto i, auto j) { return i < j ? P : N; });
  EXPECT_DOUBLE_EQ(*asymmetry_score(m).score, 1.0);
}

TEST(Asymmetry, OneOfThreePairsConsistent) {
  BinaryComparisonMatrix m(3);
  m.set(0, 1, P);
  m.set(1, 0, N);  // {0,1} consistent
  m.set(0, 2, P);
  m.set(2, 0, P);  // {0,2} first-listed wins
  m.set(1, 2, N);
  m.set(2, 1, N);  // {1,2} second-listed wins
  EXPECT_DOUBLE_EQ(*asymmetry_score(m).score, 1.0 / 3.0);
}

TEST(Asymmetry, UnresolvedPairsAreExcluded) {
  auto m = fill(3, [](auto i, auto j) { return i < j ? P : N; });
  m.set(0, 1, U);
  const auto r = asymmetry_score(m);
  EXPECT_EQ(r.resolved_pairs, 2u);
  EXPECT_DOUBLE_EQ(*r.score, 1.0);
}

TEST(Asymmetry, NoResolvedPairIsNoSignal) {
  const auto r = asymmetry_score(BinaryComparisonMatrix(4));
  EXPECT_FALSE(r.has_signal());
  EXPECT_EQ(r.resolved_pairs, 0u);
}

TEST(Asymmetry, RandomMatricesAverageOneHalf) {
  SeededRng rng(2024, "asymmetry-random");
  double sum = 0.0;
  for (int t = 0; t < 1000; ++t) {
    sum += *asymmetry_score(fill(4, [&](auto, auto) { return rng.below(2) ? P : N; })).score;
  }
  EXPECT_NEAR(sum / 1000.0, 0.5, 0.02);
}

TEST(Asymmetry, InvariantUnderOptionPermutation) {
  SeededRng rng(5, "asymmetry-perm");
  for (int t = 0; t < 200; ++t) {
    const auto m = fill(4, [&](auto, auto) { return static_cast<Preference>(int(rng.below(3)) - 1); });
    const auto perm = rng.permutation(4);
    const auto permuted = fill(4, [&](auto i, auto j) { return m.at(perm[i], perm[j]); });
    EXPECT_EQ(asymmetry_score(m).score, asymmetry_score(permuted).score);
  }
}

TEST(TriangleToRelation, UpperSucceedsDefinition) {
  BinaryComparisonMatrix m(3);
  m.set(0, 1, P);
  m.set(0, 2, P);
  m.set(1, 2, N);
  const auto r = triangle_to_relation(m, Triangle::kUpper, Relation::kSucceeds);
  EXPECT_TRUE(r.at(0, 1));
  EXPECT_TRUE(r.at(0, 2));
  EXPECT_TRUE(r.at(2, 1));
  EXPECT_EQ(r.resolved_pair_count(), 3u);
  EXPECT_FALSE(r.at(1, 0));
  EXPECT_FALSE(r.at(2, 0));
  EXPECT_FALSE(r.at(1, 2));
}

TEST(TriangleToRelation, LowerReadsReversedQueries) {
  BinaryComparisonMatrix m(3);
  m.set(1, 0, P);  // 1 listed first and won
  m.set(2, 0, N);  // 0 won
  const auto r = triangle_to_relation(m, Triangle::kLower, Relation::kSucceeds);
  EXPECT_TRUE(r.at(1, 0));
  EXPECT_TRUE(r.at(0, 2));
  EXPECT_FALSE(r.resolved(1, 2));
  EXPECT_EQ(r.resolved_pair_count(), 2u);
}

TEST(TriangleToRelation, AntisymmetricTrianglesAgree) {
  SeededRng rng(3, "antisymmetric");
  BinaryComparisonMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const bool first = rng.below(2) == 1;
      m.set(i, j, first ? P : N);
      m.set(j, i, first ? N : P);
    }
  }
  EXPECT_EQ(triangle_to_relation(m, Triangle::kUpper, Relation::kSucceeds),
            triangle_to_relation(m, Triangle::kLower, Relation::kSucceeds));
}

TEST(TriangleToRelation, PrecedesIsTranspose) {
  SeededRng rng(11, "precedes");
  for (int t = 0; t < 100; ++t) {
    const auto m = fill(4, [&](auto, auto) { return static_cast<Preference>(int(rng.below(3)) - 1); });
    for (auto tri : {Triangle::kUpper, Triangle::kLower}) {
      EXPECT_EQ(triangle_to_relation(m, tri, Relation::kPrecedes),
                triangle_to_relation(m, tri, Relation::kSucceeds).transposed());
    }
  }
}

TEST(RelationMatrix, RejectsSelfLoopsAndDoubleOrientation) {
  RelationMatrix r(3);
  EXPECT_THROW(r.add_edge(1, 1), std::invalid_argument);
  r.add_edge(0, 1);
  EXPECT_THROW(r.add_edge(1, 0), std::invalid_argument);
  EXPECT_THROW(r.add_edge(0, 1), std::invalid_argument);
}

TEST(TransitiveClosure, ChainClosesForward) {
  RelationMatrix r(4);
  r.add_edge(0, 1);
  r.add_edge(1, 2);
  r.add_edge(2, 3);
  const auto c = transitive_closure(r);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(c.at(i, j), i <= j) << i << "," << j;
  }
}

TEST(TransitiveClosure, ThreeCycleIsAllTrue) {
  RelationMatrix r(3);
  r.add_edge(0, 1);
  r.add_edge(1, 2);
  r.add_edge(2, 0);
  const auto c = transitive_closure(r);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(c.at(i, j));
  }
}

TEST(TransitiveClosure, MatchesDfsOnAllFourNodeTournaments) {
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const auto adj = testing::tournament(4, mask);
    const auto c = transitive_closure(from_adjacency(adj));
    EXPECT_EQ(to_adjacency(c), testing::dfs_reachability(adj)) << "mask " << mask;
    EXPECT_EQ(transitive_closure(c), c) << "mask " << mask;
  }
}

TEST(TransitiveClosure, MatchesDfsOnRandomSixNodeRelations) {
  SeededRng rng(6, "closure-6");
  for (int t = 0; t < 200; ++t) {
    const auto adj = random_relation(rng, 6);
    const auto r = from_adjacency(adj);
    const auto c = transitive_closure(r);
    EXPECT_EQ(to_adjacency(c), testing::dfs_reachability(adj));
    EXPECT_EQ(transitive_closure(c), c);
    EXPECT_TRUE(r.bits().contained_in(c));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(c.at(i, i));
  }
}

TEST(Transitivity, TotalOrderScoresOne) {
  RelationMatrix r(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) r.add_edge(i, j);
  }
  const auto report = transitivity_score(r);
  EXPECT_DOUBLE_EQ(*report.score, 1.0);
  EXPECT_EQ(report.pairs_on_cycles, 0u);
}

TEST(Transitivity, DominantVertexOverThreeCycle) {
  RelationMatrix r(4);
  r.add_edge(0, 1);
  r.add_edge(1, 2);
  r.add_edge(2, 0);
  for (std::size_t i = 0; i < 3; ++i) r.add_edge(3, i);
  const auto report = transitivity_score(r);
  EXPECT_DOUBLE_EQ(*report.score, 0.5);
  EXPECT_EQ(report.pairs_on_cycles, 3u);
  EXPECT_EQ(report.resolved_pairs, 6u);
}

TEST(Transitivity, NoResolvedPairIsNoSignal) {
  EXPECT_FALSE(transitivity_score(RelationMatrix(4)).has_signal());
}

TEST(Transitivity, EnumerationOfTournaments) {
  // Frozen from the DFS oracle: 24 acyclic, 16 with one 3-cycle, 24 strongly
  // connected.
  std::map<double, int> histogram;
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const auto adj = testing::tournament(4, mask);
    const auto report = transitivity_score(from_adjacency(adj));
    EXPECT_DOUBLE_EQ(*report.score, testing::dfs_transitivity(adj));
    EXPECT_DOUBLE_EQ(*report.score + double(report.pairs_on_cycles) / double(report.resolved_pairs), 1.0);
    ++histogram[*report.score];
    sum += *report.score;
  }
  EXPECT_EQ(histogram, (std::map<double, int>{{0.0, 24}, {0.5, 16}, {1.0, 24}}));
  EXPECT_DOUBLE_EQ(sum / 64.0, 0.5);
}

TEST(Transitivity, SucceedsAndPrecedesAgree) {
  SeededRng rng(8, "transpose-invariance");
  for (int t = 0; t < 200; ++t) {
    const auto r = from_adjacency(random_relation(rng, 5));
    EXPECT_EQ(transitivity_score(r).score, transitivity_score(r.transposed()).score);
  }
}

TEST(Transitivity, PartialRelationsMatchDfs) {
  SeededRng rng(9, "partial");
  for (int t = 0; t < 300; ++t) {
    const auto adj = random_relation(rng, 2 + rng.below(5));
    const auto report = transitivity_score(from_adjacency(adj));
    const double expected = testing::dfs_transitivity(adj);
    if (expected < 0) {
      EXPECT_FALSE(report.has_signal());
    } else {
      EXPECT_DOUBLE_EQ(*report.score, expected);
    }
  }
}

}  // namespace
}  // namespace prefcon
