#include "ergl/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ergl/error.hpp"
#include "ergl/philox.hpp"

namespace ergl {
namespace {

Graph complete_graph(Vertex n) {
  std::vector<Edge> edges;
  for (Vertex u = 1; u <= n; ++u)
    for (Vertex v = u + 1; v <= n; ++v) edges.push_back({u, v});
  return Graph(n, edges);
}

// Second consumer of the edge stream: visits ranks from last to first and
// inverts the rank by walking rows.
std::set<std::pair<Vertex, Vertex>> replay_edges(Vertex n, double q, std::uint64_t seed) {
  const std::uint64_t total = std::uint64_t{n} * (n - 1) / 2;
  std::set<std::pair<Vertex, Vertex>> out;
  for (std::uint64_t r = total; r-- > 0;) {
    const std::uint64_t s = r / 2;
    const PhiloxBlock b = philox4x32(
        {static_cast<std::uint32_t>(s & 0xffffffffu), static_cast<std::uint32_t>(s >> 32), 0, 0x45444745u},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const std::uint64_t word = r % 2 == 0 ? (std::uint64_t{b[0]} << 32 | b[1]) : (std::uint64_t{b[2]} << 32 | b[3]);
    if (static_cast<double>(word >> 11) / 9007199254740992.0 >= q) continue;
    std::uint64_t rest = r;
    Vertex u = 1;
    while (rest >= n - u) rest -= n - u++;
    out.insert({u, static_cast<Vertex>(u + 1 + rest)});
  }
  return out;
}

TEST(Graph, CanonicalizesAndSorts) {
  const Graph g(5, {{3, 1}, {2, 5}, {1, 2}});
  ASSERT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.edges()[0], (Edge{1, 2}));
  EXPECT_EQ(g.edges()[1], (Edge{1, 3}));
  EXPECT_TRUE(g.has_edge(5, 2));
  EXPECT_FALSE(g.has_edge(3, 4));
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(Graph(4, {{2, 2}}), ParameterError);
  EXPECT_THROW(Graph(4, {{1, 5}}), ParameterError);
  EXPECT_THROW(Graph(4, {{0, 1}}), ParameterError);
  EXPECT_THROW(Graph(4, {{1, 2}, {2, 1}}), ParameterError);
}

TEST(SampleEr, ProbabilityZeroGivesEmptyGraph) { EXPECT_EQ(sample_er_graph(8, 0.0, 7).edge_count(), 0u); }

TEST(SampleEr, ProbabilityOneGivesCompleteGraph) { EXPECT_EQ(sample_er_graph(4, 1.0, 7), complete_graph(4)); }

TEST(SampleEr, MatchesIndependentReplay) {
  for (const std::uint64_t seed : {42ull, 1ull, 0xdeadbeefcafeull}) {
    const Graph g = sample_er_graph(16, 0.25, seed);
    std::set<std::pair<Vertex, Vertex>> got;
    for (const auto& e : g.edges()) got.insert({e.u, e.v});
    EXPECT_EQ(got, replay_edges(16, 0.25, seed)) << "seed " << seed;
  }
}

TEST(SampleEr, DeterministicPerSeed) {
  EXPECT_EQ(sample_er_graph(64, 0.1, 5), sample_er_graph(64, 0.1, 5));
  EXPECT_NE(sample_er_graph(64, 0.1, 5), sample_er_graph(64, 0.1, 6));
}

TEST(SampleEr, RejectsBadArguments) {
  EXPECT_THROW(sample_er_graph(1, 0.5, 1), ParameterError);
  EXPECT_THROW(sample_er_graph(8, -0.1, 1), ParameterError);
  EXPECT_THROW(sample_er_graph(8, 1.5, 1), ParameterError);
  EXPECT_THROW(sample_er_graph(8, std::nan(""), 1), ParameterError);
}

TEST(SampleEr, PairFrequenciesWithinBand) {
  const Vertex n = 8;
  const double p = 0.3;
  const int trials = 400;
  std::vector<int> hits(n * n, 0);
  for (int t = 0; t < trials; ++t) {
    const Graph g = sample_er_graph(n, p, 1000 + t);
    for (const auto& e : g.edges()) ++hits[e.u * n + e.v - n - 1];
  }
  const double band = 4.0 * std::sqrt(p * (1 - p) / trials);
  for (Vertex u = 1; u <= n; ++u)
    for (Vertex v = u + 1; v <= n; ++v) {
      EXPECT_NEAR(hits[u * n + v - n - 1] / static_cast<double>(trials), p, band) << u << "," << v;
    }
}

TEST(PairRank, LexicographicOrder) {
  EXPECT_EQ(pair_rank(4, 1, 2), 0u);
  EXPECT_EQ(pair_rank(4, 1, 4), 2u);
  EXPECT_EQ(pair_rank(4, 2, 3), 3u);
  EXPECT_EQ(pair_rank(4, 4, 3), 5u);
  EXPECT_THROW(pair_rank(4, 2, 2), RangeError);
}

TEST(Padding, PowerOfTwoUnchanged) {
  const Graph g(16, {{1, 9}, {3, 4}});
  EXPECT_EQ(pad_to_power_of_two(g), g);
}

TEST(Padding, RoundsUpVertexCount) {
  const Graph padded = pad_to_power_of_two(Graph(5, {{1, 2}}));
  EXPECT_EQ(padded.n(), 8u);
  EXPECT_EQ(padded.edge_count(), 1u);
  EXPECT_TRUE(padded.has_edge(1, 2));
  EXPECT_EQ(pad_to_power_of_two(Graph(9, {})).n(), 16u);
}

TEST(BlockOf, Examples) {
  EXPECT_EQ(block_of(1, 2, 16), 1u);
  EXPECT_EQ(block_of(16, 2, 16), 4u);
  EXPECT_EQ(block_of(5, 2, 16), 2u);
  EXPECT_THROW(block_of(17, 2, 16), RangeError);
  EXPECT_THROW(block_of(1, 5, 16), RangeError);
}

TEST(BlockOf, ChildrenAndBalancedPreimages) {
  const Vertex n = 64;
  for (int level = 0; level <= 6; ++level) {
    std::vector<int> count((1u << level) + 1, 0);
    for (Vertex v = 1; v <= n; ++v) {
      const auto b = block_of(v, level, n);
      ++count[b];
      if (level < 6) {
        const auto child = block_of(v, level + 1, n);
        EXPECT_TRUE(child == 2 * b - 1 || child == 2 * b);
      }
    }
    for (std::uint32_t b = 1; b <= (1u << level); ++b) EXPECT_EQ(count[b], static_cast<int>(n >> level));
  }
}

TEST(LevelStats, EmptyGraph) {
  const LevelStats s = level_stats(Graph(16, {}), 2);
  EXPECT_EQ(s.g, 4u);
  EXPECT_EQ(s.nu_g, 0u);
  EXPECT_EQ(s.eg_count, 0u);
  EXPECT_EQ(s.dmax_nondef, 0u);
}

TEST(LevelStats, CrossEdge) {
  const LevelStats s = level_stats(Graph(16, {{1, 16}}), 3);
  EXPECT_EQ(s.nu_g, 0u);
  EXPECT_EQ(s.eg_count, 1u);
  EXPECT_EQ(s.dmax_nondef, 1u);
}

TEST(LevelStats, InternalEdgeMakesEveryPartnerPairDefective) {
  const LevelStats s = level_stats(Graph(16, {{1, 2}}), 3);
  EXPECT_EQ(s.nu_g, 1u);
  EXPECT_EQ(s.eg_count, 7u);
  EXPECT_EQ(s.dmax_nondef, 1u);
}

// Quadratic recomputation straight from the definitions.
LevelStats brute_level_stats(const Graph& graph, int level) {
  const Vertex n = graph.n();
  const std::uint32_t g = 1u << level;
  const Vertex w = n / g;
  auto in_block = [&](Vertex x, std::uint32_t b) { return x > (b - 1) * w && x <= b * w; };
  LevelStats s;
  s.level = level;
  s.g = g;
  std::vector<bool> defective(g + 1, false);
  for (std::uint32_t b = 1; b <= g; ++b) {
    for (const auto& e : graph.edges()) defective[b] = defective[b] || (in_block(e.u, b) && in_block(e.v, b));
    s.nu_g += defective[b];
  }
  std::vector<std::uint64_t> degree(g + 1, 0);
  for (std::uint32_t a = 1; a <= g; ++a)
    for (std::uint32_t b = a + 1; b <= g; ++b) {
      bool hit = false;
      for (const auto& e : graph.edges()) {
        const bool u_in = in_block(e.u, a) || in_block(e.u, b);
        const bool v_in = in_block(e.v, a) || in_block(e.v, b);
        hit = hit || (u_in && v_in);
      }
      if (hit) {
        ++s.eg_count;
        ++degree[a];
        ++degree[b];
      }
    }
  for (std::uint32_t b = 1; b <= g; ++b)
    if (!defective[b]) s.dmax_nondef = std::max(s.dmax_nondef, degree[b]);
  return s;
}

TEST(LevelStats, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Graph g = sample_er_graph(64, 0.03, seed);
    for (int level = 0; level <= 6; ++level) {
      const LevelStats fast = level_stats(g, level);
      const LevelStats slow = brute_level_stats(g, level);
      EXPECT_EQ(fast.nu_g, slow.nu_g) << seed << "/" << level;
      EXPECT_EQ(fast.eg_count, slow.eg_count) << seed << "/" << level;
      EXPECT_EQ(fast.dmax_nondef, slow.dmax_nondef) << seed << "/" << level;
    }
  }
}

TEST(LevelStats, InvariantsAcrossLevels) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Graph g = sample_er_graph(128, 0.02, seed);
    for (int level = 0; level <= 7; ++level) {
      const LevelStats s = level_stats(g, level);
      EXPECT_LE(s.nu_g, s.g);
      EXPECT_LE(s.eg_count, s.g * (s.g - 1) / 2);
      if (s.g > 0) EXPECT_LE(s.dmax_nondef, s.g - 1);
      // Internal plus cross edge counts add up to k.
      std::uint64_t internal = 0, cross = 0;
      for (const auto& e : g.edges()) (block_of(e.u, level, 128) == block_of(e.v, level, 128) ? internal : cross)++;
      EXPECT_EQ(internal + cross, g.edge_count());
    }
    const LevelStats top = level_stats(g, 7);
    std::vector<std::uint64_t> degree(129, 0);
    for (const auto& e : g.edges()) ++degree[e.u], ++degree[e.v];
    EXPECT_EQ(top.nu_g, 0u);
    EXPECT_EQ(top.eg_count, g.edge_count());
    EXPECT_EQ(top.dmax_nondef, *std::max_element(degree.begin(), degree.end()));
  }
}

TEST(Typicality, EmptyGraphFailsEdgeCount) {
  SparsityParams p{0.5, 16, 100.0 / 120.0, 100.0};
  const TypicalityReport r = typicality_check(Graph(16, {}), p, 0.1);
  EXPECT_FALSE(r.cond_i);
  EXPECT_FALSE(r.overall);
}

TEST(Typicality, CompleteGraphFailsUpperBound) {
  SparsityParams p{0.4, 16, 10.0 / 120.0, 10.0};
  const TypicalityReport r = typicality_check(complete_graph(16), p, 0.1);
  EXPECT_FALSE(r.cond_i);
  EXPECT_FALSE(r.overall);
}

TEST(Typicality, DegenerateBelowOneEdge) {
  const TypicalityReport r = typicality_check(Graph(16, {}), SparsityParams::from_q(16, 0.0), 0.2);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.levels.empty());
}

TEST(Typicality, MatchesBruteForceRecomputation) {
  for (const double theta : {0.4, 0.6}) {
    const SparsityParams p = SparsityParams::from_theta(64, theta);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Graph g = sample_er_graph(64, p.q, seed);
      const TypicalityReport r = typicality_check(g, p, 0.2);
      const double kbar = p.kbar;
      int first = 0;
      while (std::pow(2.0, first) < std::sqrt(kbar) - 1e-9) ++first;
      ASSERT_EQ(r.levels.size(), static_cast<std::size_t>(6 - first + 1));
      bool all = std::abs(static_cast<double>(g.edge_count()) - kbar) <= 0.2 * kbar;
      EXPECT_EQ(r.cond_i, all);
      for (int level = first; level <= 6; ++level) {
        const auto& row = r.levels[static_cast<std::size_t>(level - first)];
        const LevelStats s = brute_level_stats(g, level);
        const double gg = std::pow(2.0, level);
        const double emax = theta > 0.5 ? 4 * kbar : 2 * kbar * std::log(kbar) * std::log(kbar);
        const double numax = theta > 0.5 ? 2 * kbar / gg : 2 * std::sqrt(kbar);
        const double dmax = theta > 0.5 ? 10 * kbar / gg : 8 * std::sqrt(kbar);
        EXPECT_EQ(row.stats.eg_count, s.eg_count);
        EXPECT_EQ(row.stats.nu_g, s.nu_g);
        EXPECT_EQ(row.stats.dmax_nondef, s.dmax_nondef);
        EXPECT_DOUBLE_EQ(row.e_max, emax);
        EXPECT_DOUBLE_EQ(row.nu_max, numax);
        EXPECT_DOUBLE_EQ(row.d_max, dmax);
        const bool ok = s.eg_count <= emax && s.nu_g <= numax && s.dmax_nondef <= dmax;
        EXPECT_EQ(row.ok(), ok);
        all = all && ok;
      }
      EXPECT_EQ(r.overall, all);
    }
  }
}

TEST(Typicality, HoldsForMostSampledGraphs) {
  const SparsityParams p = SparsityParams::from_theta(1024, 0.6);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    passed += typicality_check(sample_er_graph(1024, p.q, seed), p, 0.2).overall;
  }
  EXPECT_GE(passed, 190);
}

TEST(Sparsity, ExpectedEdgeCount) {
  const SparsityParams p = SparsityParams::from_theta(1024, 0.5);
  EXPECT_NEAR(p.kbar, 1024.0, 1e-9 * 1024);
  EXPECT_NEAR(p.kbar, p.q * 1024 * 1023 / 2, 1e-9 * p.kbar);
  const SparsityParams r = SparsityParams::from_q(1024, p.q);
  EXPECT_NEAR(r.theta, 0.5, 1e-9);
  EXPECT_EQ(SparsityParams::from_theta(4, 0.99).q, 1.0);
}

TEST(Rounding, CeilHelpers) {
  EXPECT_EQ(ceil_log2_sqrt(1.0), 0);
  EXPECT_EQ(ceil_log2_sqrt(4.0), 1);
  EXPECT_EQ(ceil_log2_sqrt(5.0), 2);
  EXPECT_EQ(ceil_log2_sqrt(1024.0), 5);
  EXPECT_EQ(ceil_count(3.0000000000001), 3u);
  EXPECT_EQ(ceil_count(3.01), 4u);
  EXPECT_EQ(floor_log2(1024), 10);
  EXPECT_EQ(ceil_log2(1025), 11);
}

}  // namespace
}  // namespace ergl
