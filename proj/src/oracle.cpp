#include "ergl/oracle.hpp"

#include <map>
#include <set>
#include <utility>

#include "ergl/error.hpp"

namespace ergl {
namespace {

using PairSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

PairSet all_pairs(std::uint32_t g) {
  PairSet pairs;
  for (std::uint32_t u = 1; u <= g; ++u) {
    for (std::uint32_t v = u + 1; v <= g; ++v) pairs.insert({u, v});
  }
  return pairs;
}

PairSet children(const PairSet& pairs) {
  PairSet next;
  for (const auto& [u, v] : pairs) {
    const std::uint32_t a[2] = {2 * u - 1, 2 * u};
    const std::uint32_t b[2] = {2 * v - 1, 2 * v};
    for (const auto x : a) {
      for (const auto y : b) next.insert({std::min(x, y), std::max(x, y)});
    }
    next.insert({a[0], a[1]});
    next.insert({b[0], b[1]});
  }
  return next;
}

// Blocks of `width` consecutive labels that lie entirely inside `labels`.
std::vector<std::uint32_t> covered_blocks(const std::vector<std::uint32_t>& labels, std::uint32_t width) {
  std::map<std::uint32_t, std::uint32_t> hits;
  for (const auto x : labels) ++hits[(x - 1) / width + 1];
  std::vector<std::uint32_t> blocks;
  for (const auto& [block, count] : hits) {
    if (count == width) blocks.push_back(block);
  }
  return blocks;
}

void add_cleared(const std::vector<std::uint32_t>& blocks, PairSet& cleared) {
  for (std::size_t x = 0; x < blocks.size(); ++x) {
    for (std::size_t y = x + 1; y < blocks.size(); ++y) cleared.insert({blocks[x], blocks[y]});
  }
}

PairSet without(const PairSet& pairs, const PairSet& cleared) {
  PairSet kept;
  for (const auto& p : pairs) {
    if (!cleared.count(p)) kept.insert(p);
  }
  return kept;
}

std::vector<std::uint32_t> to_labels(const PartitionedDesign& design, std::uint32_t i, std::uint32_t j,
                                     std::uint32_t t, const std::vector<Vertex>& vertices) {
  std::vector<std::uint32_t> labels;
  labels.reserve(vertices.size());
  for (const auto x : vertices) labels.push_back(design.local_label(i, j, t, x));
  return labels;
}

PairSet cleared_by_stage(const PartitionedDesign& design, const Outcomes& outcomes, const Stage& stage,
                         std::uint32_t i, std::uint32_t j, std::uint32_t t) {
  PairSet cleared;
  const std::uint32_t width = design.sub_n() >> stage.level;
  for (std::uint64_t id = stage.first_test; id < stage.first_test + stage.test_count(); ++id) {
    if (outcomes.at(id)) continue;
    add_cleared(covered_blocks(to_labels(design, i, j, t, vertices_in_test(design, id)), width), cleared);
  }
  return cleared;
}

}  // namespace

TestList expand_tests(const Design& design) {
  TestList tests;
  tests.reserve(design.total_tests());
  for (std::uint64_t id = 0; id < design.total_tests(); ++id) tests.push_back(vertices_in_test(design, id));
  return tests;
}

TestList expand_tests(const PartitionedDesign& design) {
  TestList tests;
  tests.reserve(design.total_tests());
  for (std::uint64_t id = 0; id < design.total_tests(); ++id) tests.push_back(vertices_in_test(design, id));
  return tests;
}

Outcomes naive_simulate(const TestList& tests, const Graph& graph) {
  Outcomes outcomes(tests.size());
  std::vector<char> member(std::size_t{graph.n()} + 1, 0);
  for (std::size_t id = 0; id < tests.size(); ++id) {
    for (const auto v : tests[id]) member.at(v) = 1;
    for (const auto& e : graph.edges()) {
      if (member[e.u] && member[e.v]) {
        outcomes.set(id);
        break;
      }
    }
    for (const auto v : tests[id]) member[v] = 0;
  }
  return outcomes;
}

std::vector<Edge> naive_reference_decode(const Design& design, const Outcomes& outcomes) {
  if (outcomes.size() != design.total_tests()) throw ParameterError("naive decode: outcomes do not match design");
  PairSet pd = all_pairs(std::uint32_t{1} << design.level_min());
  for (int level = design.level_min(); level <= design.level_final(); ++level) {
    const Stage& stage = design.stage(level);
    const std::uint32_t width = design.n() >> level;
    PairSet cleared;
    for (std::uint64_t id = stage.first_test; id < stage.first_test + stage.test_count(); ++id) {
      if (!outcomes.at(id)) add_cleared(covered_blocks(vertices_in_test(design, id), width), cleared);
    }
    pd = without(pd, cleared);
    if (level < design.level_final()) pd = children(pd);
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : pd) edges.push_back({u, v});
  return edges;
}

std::vector<Edge> naive_partitioned_decode(const PartitionedDesign& design, const Outcomes& outcomes) {
  if (outcomes.size() != design.total_tests()) throw ParameterError("naive decode: outcomes do not match design");
  std::set<std::pair<Vertex, Vertex>> found;
  const auto& params = design.params();
  for (std::uint32_t i = 1; i <= design.parts(); ++i) {
    for (std::uint32_t j = i + 1; j <= design.parts(); ++j) {
      std::uint32_t chosen = 0;
      for (std::uint32_t t = 1; t <= params.c && chosen == 0; ++t) {
        const Stage screen = design.screen_stage(i, j, t, 1);
        const std::uint32_t width = design.sub_n() >> screen.level;
        std::set<std::uint32_t> passed;
        for (std::uint64_t id = screen.first_test; id < screen.first_test + screen.test_count(); ++id) {
          if (outcomes.at(id)) continue;
          for (const auto b : covered_blocks(to_labels(design, i, j, t, vertices_in_test(design, id)), width)) {
            passed.insert(b);
          }
        }
        if (passed.size() == design.g0()) chosen = t;
      }
      if (chosen == 0) continue;
      for (std::uint32_t r = 1; r <= params.cprime; ++r) {
        PairSet pd = all_pairs(design.g0());
        bool overflow = false;
        for (int level = design.level0(); level <= design.sub_log2n(); ++level) {
          if (pd.size() > design.overflow_cap()) {
            overflow = true;
            break;
          }
          pd = without(pd, cleared_by_stage(design, outcomes, design.stage(i, j, chosen, r, level), i, j, chosen));
          if (level < design.sub_log2n()) pd = children(pd);
        }
        if (overflow) continue;
        for (const auto& [a, b] : pd) {
          const Vertex x = design.global_vertex(i, j, chosen, a);
          const Vertex y = design.global_vertex(i, j, chosen, b);
          found.insert({std::min(x, y), std::max(x, y)});
        }
        break;
      }
    }
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : found) edges.push_back({u, v});
  return edges;
}

std::vector<Edge> comp_decode(Vertex n, const TestList& tests, const Outcomes& outcomes) {
  if (outcomes.size() != tests.size()) throw ParameterError("comp_decode: one outcome per test required");
  std::vector<std::size_t> negative;
  for (std::size_t id = 0; id < tests.size(); ++id) {
    if (!outcomes.at(id)) negative.push_back(id);
  }
  const std::size_t words = (negative.size() + 63) / 64;
  std::vector<std::uint64_t> bits((std::size_t{n} + 1) * words, 0);
  for (std::size_t k = 0; k < negative.size(); ++k) {
    for (const auto v : tests[negative[k]]) {
      if (v < 1 || v > n) throw RangeError("comp_decode: vertex outside [1, n]");
      bits[v * words + k / 64] |= std::uint64_t{1} << (k % 64);
    }
  }
  std::vector<Edge> edges;
  for (Vertex u = 1; u <= n; ++u) {
    for (Vertex v = u + 1; v <= n; ++v) {
      bool together = false;
      for (std::size_t w = 0; w < words && !together; ++w) together = (bits[u * words + w] & bits[v * words + w]) != 0;
      if (!together) edges.push_back({u, v});
    }
  }
  return edges;
}

}  // namespace ergl
