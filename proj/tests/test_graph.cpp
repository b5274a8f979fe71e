#include <gtest/gtest.h>

#include <random>

#include "iochain/graph.hpp"
#include "iochain/io_table.hpp"
#include "support/morocco_like.hpp"
#include "support/oracles.hpp"
#include "support/random_economy.hpp"

using namespace iochain;

namespace {

Digraph from_edges(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  BoolMatrix adj(n);
  for (auto [i, j] : edges) adj.set(i, j);
  return Digraph(fixtures::pole_labels(n, "v"), std::move(adj));
}

const Matrix kTwoPoleAlpha{{0.1, 0.4}, {0.1, 0.4}};

}  // namespace

TEST(Digraph, RejectsDuplicateLabelsAndBadSizes) {
  EXPECT_THROW(Digraph({"a", "a"}, BoolMatrix(2)), ValidationError);
  EXPECT_THROW(Digraph({"a"}, BoolMatrix(2)), DimensionMismatch);
}

TEST(AdjacencyFromMatrix, Examples) {
  EXPECT_EQ(adjacency_from_matrix(Matrix(3, 3), fixtures::pole_labels(3)).arc_count(), 0u);
  const Digraph loops = adjacency_from_matrix(Matrix::identity(3), fixtures::pole_labels(3));
  EXPECT_EQ(loops.arc_count(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(loops.has_arc(i, i));
  const Digraph two = adjacency_from_matrix(kTwoPoleAlpha, {"P1", "P2"});
  EXPECT_EQ(two.arc_count(), 4u);
}

TEST(AdjacencyFromMatrix, ToleranceDropsSmallWeights) {
  const Digraph g = adjacency_from_matrix(kTwoPoleAlpha, {"P1", "P2"}, 0.2);
  EXPECT_EQ(g.arc_count(), 2u);
  EXPECT_TRUE(g.has_arc(0, 1));
  EXPECT_TRUE(g.has_arc(1, 1));
}

TEST(Accessibility, SingleVertex) {
  const auto r = accessibility(from_edges(1, {}));
  EXPECT_TRUE(r.accessibility(0, 0));
  EXPECT_EQ(r.dist(0, 0), 0u);
}

TEST(Accessibility, Path) {
  const auto r = accessibility(from_edges(3, {{0, 1}, {1, 2}}));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(r.accessibility(i, j), i <= j);
  EXPECT_EQ(r.dist(0, 2), 2u);
  EXPECT_EQ(r.dist(2, 0), kUnreachable);
}

TEST(Accessibility, TwoCycle) {
  const auto r = accessibility(from_edges(2, {{0, 1}, {1, 0}}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(r.accessibility(i, j));
  EXPECT_EQ(r.dist(0, 0), 0u);
  EXPECT_EQ(r.dist(0, 1), 1u);
  EXPECT_EQ(r.dist(1, 0), 1u);
}

TEST(StrongComponents, CompleteDigraphIsOneComponent) {
  BoolMatrix adj(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) adj.set(i, j);
  EXPECT_EQ(strong_components(Digraph(fixtures::pole_labels(4), adj)).components.size(), 1u);
}

TEST(StrongComponents, DagGivesSingletonsAndIsomorphicCondensation) {
  const Digraph g = from_edges(3, {{0, 1}, {1, 2}});
  const auto parts = strong_components(g);
  ASSERT_EQ(parts.components.size(), 3u);
  EXPECT_EQ(parts.condensation.adjacency(), g.adjacency());
  EXPECT_EQ(parts.condensation.labels(), g.labels());
}

TEST(StrongComponents, CondensationLabelsJoinMembers) {
  const auto parts = strong_components(from_edges(3, {{0, 2}, {2, 0}, {2, 1}}));
  ASSERT_EQ(parts.components.size(), 2u);
  EXPECT_EQ(parts.condensation.labels()[0], "v1+v3");
  EXPECT_EQ(parts.condensation.labels()[1], "v2");
  EXPECT_TRUE(parts.condensation.has_arc(0, 1));
}

TEST(StrongComponents, MoroccoLikeWebHasThreeComponents) {
  const auto chain = augment(coefficients(fixtures::morocco_like_table()), Orientation::indirect);
  const auto parts = strong_components(adjacency_from_matrix(chain.transition, chain.labels));
  ASSERT_EQ(parts.components.size(), 3u);
  EXPECT_EQ(parts.components[0].size(), 35u);
  EXPECT_EQ(chain.labels[parts.components[1][0]], "D97T98");
  EXPECT_EQ(chain.labels[parts.components[2][0]], "FE");
}

TEST(StrongComponents, LongChainDoesNotOverflowTheStack) {
  const std::size_t n = 20000;
  BoolMatrix adj(n);
  for (std::size_t i = 0; i + 1 < n; ++i) adj.set(i, i + 1);
  adj.set(n - 1, 0);
  EXPECT_EQ(strong_components(Digraph(fixtures::pole_labels(n), std::move(adj))).components.size(), 1u);
}

TEST(StrongComponents, MatchMutualReachabilityOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Digraph g = fixtures::random_digraph(rng, 12);
    EXPECT_EQ(strong_components(g).components, fixtures::mutual_reachability_classes(g));
  }
}

TEST(StrongComponents, CondensationIsAcyclic) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto parts = strong_components(fixtures::random_digraph(rng, 12));
    EXPECT_TRUE(topological_order(parts.condensation).has_value());
  }
}

TEST(TopologicalOrder, DetectsCycles) {
  EXPECT_FALSE(topological_order(from_edges(2, {{0, 1}, {1, 0}})).has_value());
  const auto order = topological_order(from_edges(3, {{2, 1}, {1, 0}}));
  ASSERT_TRUE(order.has_value());
  EXPECT_EQ(*order, (std::vector<std::size_t>{2, 1, 0}));
}

TEST(Accessibility, MatchesBooleanPowers) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Digraph g = fixtures::random_digraph(rng, 8);
    const auto r = accessibility(g);
    EXPECT_EQ(r.distance, fixtures::distances_by_powers(g));
    const Matrix oracle = fixtures::reachability_by_powers(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(r.accessibility(i, j), oracle(i, j) > 0.0);
  }
}

TEST(ClassifyStates, TwoPoleAugmentedChain) {
  const Matrix p{{0.1, 0.4, 0.5}, {0.1, 0.4, 0.5}, {0, 0, 1}};
  const auto s = classify_states(adjacency_from_matrix(p, {"P1", "P2", "FE"}));
  EXPECT_EQ(s.kinds, (std::vector<StateKind>{StateKind::transient, StateKind::transient, StateKind::absorbing}));
  EXPECT_EQ(s.closed_sets, (std::vector<std::vector<std::size_t>>{{2}}));
}

TEST(ClassifyStates, IdentityIsAllAbsorbing) {
  const auto s = classify_states(adjacency_from_matrix(Matrix::identity(3), fixtures::pole_labels(3)));
  EXPECT_EQ(s.states_of(StateKind::absorbing).size(), 3u);
}

TEST(ClassifyStates, RecurrentClassAndErrors) {
  const Matrix p{{0, 1, 0}, {1, 0, 0}, {0.5, 0, 0.5}};
  const auto s = classify_states(adjacency_from_matrix(p, fixtures::pole_labels(3)));
  EXPECT_EQ(s.kinds, (std::vector<StateKind>{StateKind::recurrent, StateKind::recurrent, StateKind::transient}));
  EXPECT_THROW(classify_states(adjacency_from_matrix(kTwoPoleAlpha, {"a", "b"})), NotStochastic);
  EXPECT_THROW(classify_states(from_edges(2, {{0, 1}})), NotStochastic);
}

TEST(ClassifyStates, MoroccoLikeChainHasOnlyFinalDemandAbsorbing) {
  const auto chain = augment(coefficients(fixtures::morocco_like_table()), Orientation::indirect);
  const auto s = classify_states(adjacency_from_matrix(chain.transition, chain.labels));
  EXPECT_EQ(s.states_of(StateKind::absorbing), (std::vector<std::size_t>{36}));
  EXPECT_EQ(s.states_of(StateKind::transient).size(), 36u);
}

TEST(ClassifyStates, ClosedSetsAreSound) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Digraph shape = fixtures::random_digraph(rng, 10);
    const std::size_t n = shape.size();
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (shape.has_arc(i, j)) total += (p(i, j) = unit(rng) + 0.01);
      if (total == 0.0) {
        p(i, i) = 1.0;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) p(i, j) /= total;
    }
    const Digraph g = adjacency_from_matrix(p, shape.labels());
    const auto s = classify_states(g);
    for (const auto& set : s.closed_sets)
      for (std::size_t v : set)
        for (std::size_t w = 0; w < n; ++w)
          if (g.has_arc(v, w)) {
            EXPECT_NE(std::find(set.begin(), set.end(), w), set.end());
          }
  }
}

TEST(EssentialFlows, Examples) {
  const Digraph g = adjacency_from_matrix(kTwoPoleAlpha, {"P1", "P2"});
  EXPECT_EQ(essential_flows(g, 1e-300).adjacency(), g.adjacency());
  EXPECT_EQ(essential_flows(g, 1.0).arc_count(), 0u);
  const Digraph kept = essential_flows(g, 1.0 / 3.0);
  EXPECT_EQ(kept.arc_count(), 2u);
  EXPECT_TRUE(kept.has_arc(0, 1));
  EXPECT_TRUE(kept.has_arc(1, 1));
  EXPECT_THROW(essential_flows(g, 0.0), InputError);
  EXPECT_THROW(essential_flows(g, 1.5), InputError);
  EXPECT_THROW(essential_flows(from_edges(2, {}), 0.5), InputError);
}

TEST(EssentialFlows, FairDivisionThreshold) {
  EXPECT_DOUBLE_EQ(fair_division_threshold(37), 1.0 / 37.0);
}
