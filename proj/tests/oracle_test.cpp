#include "ergl/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "ergl/decoder.hpp"
#include "support.hpp"

namespace ergl {
namespace {

std::vector<Edge> all_pairs(Vertex n) {
  std::vector<Edge> out;
  for (Vertex u = 1; u <= n; ++u)
    for (Vertex v = u + 1; v <= n; ++v) out.push_back({u, v});
  return out;
}

TEST(ExpandTests, CoversEveryVertexOncePerRound) {
  const Design d(32, 4.0, DesignParams{}, 6);
  const TestList tests = expand_tests(d);
  ASSERT_EQ(tests.size(), d.total_tests());
  for (const Stage& s : d.stages()) {
    for (std::uint32_t it = 0; it < s.iterations; ++it) {
      std::vector<int> seen(33, 0);
      for (std::uint32_t slot = 0; slot < s.tests_per_iteration; ++slot)
        for (const Vertex v : tests[s.test_id(it, slot)]) ++seen[v];
      EXPECT_EQ(std::count(seen.begin() + 1, seen.end(), 1), 32);
    }
  }
}

TEST(NaiveSimulate, AgreesWithFastPaths) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Graph g = sample_er_graph(64, 0.01 * static_cast<double>(seed), seed);
    const Design d(64, 20.0, DesignParams{}, seed);
    EXPECT_EQ(naive_simulate(expand_tests(d), g), simulate_outcomes(d, g));
  }
  const Graph g = sample_er_graph(128, 40.0 / (64 * 127), 3);
  DesignParams p;
  p.c = 2;
  p.cprime = 2;
  const PartitionedDesign pd(128, 40.0, p, 3);
  EXPECT_EQ(naive_simulate(expand_tests(pd), g), simulate_outcomes(pd, g));
}

TEST(NaiveReference, AllPositiveKeepsEveryPair) {
  const Design d(16, 4.0, DesignParams{}, 1);
  Outcomes out(d.total_tests());
  for (std::uint64_t t = 0; t < d.total_tests(); ++t) out.set(t);
  EXPECT_EQ(naive_reference_decode(d, out), all_pairs(16));
  EXPECT_EQ(decode_basic(d, out).edges, all_pairs(16));
}

TEST(NaiveReference, SingleEdgePresent) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Design d(32, 2.0, DesignParams{}, seed);
    const Graph g(32, {{3, 30}});
    const auto edges = naive_reference_decode(d, simulate_outcomes(d, g));
    EXPECT_TRUE(std::binary_search(edges.begin(), edges.end(), Edge{3, 30}));
  }
}

TEST(NaiveReference, EqualsDecodeBasic) {
  const DesignParams p = testing::calibrated_params();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Vertex n = 16u << (seed % 3);
    const double kbar = std::max(1.0, 0.1 * static_cast<double>(seed % 40));
    const Graph g = sample_er_graph(n, std::min(1.0, kbar / (n * (n - 1.0) / 2)), seed);
    const Design d(n, kbar, p, seed);
    const Outcomes out = simulate_outcomes(d, g);
    ASSERT_EQ(naive_reference_decode(d, out), decode_basic(d, out).edges) << seed;
  }
}

TEST(NaivePartitioned, EmptyOutcomesGiveEmptyEstimate) {
  DesignParams p;
  p.c = 2;
  p.cprime = 2;
  const PartitionedDesign d(128, 40.0, p, 3);
  EXPECT_TRUE(naive_partitioned_decode(d, Outcomes(d.total_tests())).empty());
}

TEST(Comp, UncoveredPairIsDeclared) {
  const TestList tests{{1, 2}, {2, 3}};
  const Outcomes none(2);
  EXPECT_EQ(comp_decode(4, tests, none), (std::vector<Edge>{{1, 3}, {1, 4}, {2, 4}, {3, 4}}));
}

TEST(Comp, AllNegativeFullCoverageIsEmpty) {
  const TestList tests{{1, 2, 3, 4}, {2, 3}};
  Outcomes out(2);
  EXPECT_EQ(comp_decode(4, tests, out).size(), 0u);
  out.set(0);
  EXPECT_EQ(comp_decode(4, tests, out), (std::vector<Edge>{{1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}}));
}

TEST(Comp, SupersetOfTruthAcrossTrials) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const Vertex n = 32;
    const Graph g = sample_er_graph(n, 0.02, seed);
    const Design d(n, std::max(1.0, 0.02 * 496), DesignParams{}, seed);
    const TestList tests = expand_tests(d);
    const auto edges = comp_decode(n, tests, naive_simulate(tests, g));
    ASSERT_TRUE(std::includes(edges.begin(), edges.end(), g.edges().begin(), g.edges().end())) << seed;
  }
}

}  // namespace
}  // namespace ergl
