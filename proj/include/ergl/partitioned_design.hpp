#pragma once

// Partitioned design: V is split into `parts` equal parts S_1..S_m and every
// pair (i, j), i < j, gets its own binary-splitting sub-design on the induced
// subgraph G_ij. One tuple of affine permutations over [n_ij] is shared by all
// pairs through the relabeling maps lambda_ij.
//
// Test layout: segments (pair, t, r) in lexicographic order, all of equal
// size. A segment holds the level-l0 screen rounds followed by the
// sub-design stages l0..log2 n_ij.

#include <cstdint>
#include <utility>
#include <vector>

#include "ergl/design.hpp"
#include "ergl/field.hpp"
#include "ergl/graph.hpp"

namespace ergl {

class PartitionedDesign {
 public:
  PartitionedDesign(std::uint32_t n, double kbar, const DesignParams& params, std::uint64_t seed);

  std::uint32_t n() const { return n_; }
  double kbar() const { return kbar_; }
  double q() const { return q_; }
  const DesignParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const PhiloxKey& key() const { return key_; }

  std::uint32_t parts() const { return parts_; }
  std::uint32_t part_size() const { return n_ / parts_; }
  std::uint32_t sub_n() const { return sub_n_; }
  int sub_log2n() const { return sub_log2n_; }
  double sub_kbar() const { return sub_kbar_; }
  int level0() const { return level0_; }
  std::uint32_t g0() const { return std::uint32_t{1} << level0_; }
  std::uint32_t screen_iterations() const { return screen_iterations_; }
  std::uint32_t screen_tests() const { return screen_tests_; }
  std::uint64_t overflow_cap() const { return overflow_cap_; }
  const TestCount& sub_layout() const { return sub_layout_; }

  std::uint32_t pair_count() const { return parts_ * (parts_ - 1) / 2; }
  /// 0-based rank of (i, j), 1 <= i < j <= parts, in lexicographic order.
  std::uint32_t pair_index(std::uint32_t i, std::uint32_t j) const;
  std::pair<std::uint32_t, std::uint32_t> pair_at(std::uint32_t index) const;
  /// Part (1-based) holding a vertex.
  std::uint32_t part_of(Vertex v) const { return (v - 1) / part_size() + 1; }

  const std::vector<AffinePermutation>& permutations() const { return perms_; }
  LabelMap label_map(std::uint32_t i, std::uint32_t j) const { return LabelMap(i, j, n_, parts_); }

  std::uint64_t segment_tests() const { return segment_tests_; }
  std::uint64_t total_tests() const { return segment_tests_ * segment_count(); }
  std::uint64_t segment_count() const { return std::uint64_t{pair_count()} * params_.c * params_.cprime; }
  /// t and r are 1-based.
  std::uint64_t segment_index(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const;

  Stage screen_stage(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const;
  Stage stage(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r, int level) const;
  /// Screen stage first, then levels l0..log2 n_ij.
  std::vector<Stage> segment_stages(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const;

  /// pi_t^{-1}(lambda_ij(x)): the 1-based label whose blocks carry vertex x
  /// under permutation t.
  std::uint32_t local_label(std::uint32_t i, std::uint32_t j, std::uint32_t t, Vertex x) const;
  /// lambda_ij^{-1}(pi_t(label)).
  Vertex global_vertex(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t label) const;

  friend bool operator==(const PartitionedDesign& a, const PartitionedDesign& b) {
    return a.n_ == b.n_ && a.kbar_ == b.kbar_ && a.params_ == b.params_ && a.seed_ == b.seed_;
  }

 private:
  void check_segment(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const;

  std::uint32_t n_;
  double kbar_;
  double q_ = 0.0;
  DesignParams params_;
  std::uint64_t seed_;
  PhiloxKey key_;
  std::uint32_t parts_ = 0;
  std::uint32_t sub_n_ = 0;
  int sub_log2n_ = 0;
  double sub_kbar_ = 0.0;
  int level0_ = 0;
  std::uint32_t screen_iterations_ = 0;
  std::uint32_t screen_tests_ = 0;
  std::uint64_t overflow_cap_ = 0;
  TestCount sub_layout_;
  std::uint64_t screen_block_ = 0;
  std::uint64_t segment_tests_ = 0;
  std::vector<AffinePermutation> perms_;
};

/// Power of two nearest to kbar^{(1-gamma)/2} on the log scale (ties go up),
/// clamped to [2, n/2].
std::uint32_t choose_parts(std::uint32_t n, double kbar, double gamma);

PartitionedDesign build_partitioned_design(std::uint32_t n, double kbar, const DesignParams& params,
                                           std::uint64_t seed);

/// Edges of G_ij as 0-based permuted labels under permutation t.
std::vector<LocalEdge> subgraph_local_edges(const PartitionedDesign& design, const Graph& graph,
                                            std::uint32_t i, std::uint32_t j, std::uint32_t t);

Outcomes simulate_outcomes(const PartitionedDesign& design, const Graph& graph);

std::vector<Vertex> vertices_in_test(const PartitionedDesign& design, std::uint64_t test_id);

/// Statistics of the permuted block graph H^{(t, level)} of G_ij.
struct BlockGraphStats {
  std::uint64_t nu = 0;          // blocks with an internal edge
  std::uint64_t edges = 0;       // block pairs whose union holds an edge
  std::uint64_t max_degree = 0;  // over all blocks
};

BlockGraphStats permuted_block_stats(const PartitionedDesign& design, const Graph& graph, std::uint32_t i,
                                     std::uint32_t j, std::uint32_t t, int level);

/// Per-pair typicality conditions for (G, Pi): (C1) edge-count window,
/// (C2) some permutation leaves no defective block at l0, (C3) block-graph
/// degrees bounded by sqrt(kbar_ij) at every level >= l0.
struct PartitionTypicality {
  std::uint32_t pairs = 0;
  std::uint32_t c1_pass = 0;
  std::uint32_t c2_pass = 0;
  std::uint32_t c3_pass = 0;
  bool all() const { return c1_pass == pairs && c2_pass == pairs && c3_pass == pairs; }
};

PartitionTypicality partition_typicality(const PartitionedDesign& design, const Graph& graph);

}  // namespace ergl
