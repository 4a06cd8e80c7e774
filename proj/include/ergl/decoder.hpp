#pragma once

// Coarse-to-fine decoders. A PD set holds the block pairs at one level that
// no negative test has ruled out; survivors are split into their six child
// pairs and re-checked one level down.
//
// Cost accounting: `outcome_checks` is bumped once per (pair, round) that a
// decoder examines, and a pair stops being examined at its first negative
// co-containing test. The table-driven decoder instead counts one check per
// listed test it reads.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergl/design.hpp"
#include "ergl/graph.hpp"
#include "ergl/partitioned_design.hpp"

namespace ergl {

enum class DecodeStatus { completed, overflow_terminated, screen_failed };

std::string to_string(DecodeStatus status);
DecodeStatus parse_decode_status(const std::string& text);

/// Block pairs (u < v, 1-based) at one level, kept sorted and unique as
/// packed 64-bit keys.
struct PDSet {
  int level = 0;
  std::vector<std::uint64_t> pairs;

  std::size_t size() const { return pairs.size(); }
  bool contains(std::uint32_t u, std::uint32_t v) const;
};

/// All pairs over the g = 2^level blocks.
PDSet full_pd_set(int level);

/// Children of block i are 2i-1 and 2i: four cross pairs then the two
/// sibling pairs, each canonical.
std::array<Edge, 6> split_pair(std::uint32_t u, std::uint32_t v);
/// PD set one level down: split every pair and deduplicate.
PDSet split_all(const PDSet& pd);

struct DecodeResult {
  std::vector<Edge> edges;  // sorted
  int first_level = 0;
  std::vector<std::uint64_t> pd_sizes;  // pd_sizes[k] = |PD| at level first_level + k
  std::uint64_t outcome_checks = 0;
  DecodeStatus status = DecodeStatus::completed;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> failed_pairs;  // partitioned: (i, j) without a passing screen
  std::uint64_t overflowed_pairs = 0;                                   // partitioned: every round hit the cap

  std::uint64_t max_pd() const;
};

/// True iff some round at `level` places blocks u and v in the same test and
/// that test is negative. Rounds are scanned in order and the scan stops at
/// the first such test; `checks` gains one per round examined.
bool pair_cleared(const Design& design, const Outcomes& outcomes, int level, std::uint32_t u, std::uint32_t v,
                  std::uint64_t* checks = nullptr);

/// Drops the pairs of `pairs` (1-based blocks at stage.level) cleared by the
/// stage. Returns the number of (pair, round) checks performed.
std::uint64_t retain_uncleared(const PhiloxKey& key, const Stage& stage, const Outcomes& outcomes,
                               std::vector<std::uint64_t>& pairs);

/// Coarse-to-fine decoding of the binary-splitting design.
DecodeResult decode_basic(const Design& design, const Outcomes& outcomes);

/// Per level, CSR lists of the test ids containing both blocks of each pair,
/// indexed by lexicographic pair rank over the level's blocks.
class IndexTables {
 public:
  IndexTables() = default;
  explicit IndexTables(const Design& design);

  std::uint32_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  int level_min() const { return level_min_; }
  int level_final() const { return level_final_; }

  /// IND^level(u, v) for 1-based blocks u != v.
  std::span<const std::uint64_t> tests(int level, std::uint32_t u, std::uint32_t v) const;
  std::uint64_t max_size(int level) const;
  std::uint64_t entry_count() const;

  bool matches(const Design& design) const;

 private:
  struct Level {
    std::vector<std::uint64_t> offsets;
    std::vector<std::uint64_t> ids;
  };
  std::uint32_t n_ = 0;
  double kbar_ = 0.0;
  DesignParams params_;
  std::uint64_t seed_ = 0;
  int level_min_ = 0;
  int level_final_ = 0;
  std::vector<Level> levels_;
};

IndexTables precompute_index_tables(const Design& design);
/// Same edge set as decode_basic; reads only the listed tests of each pair.
DecodeResult decode_with_tables(const Design& design, const Outcomes& outcomes, const IndexTables& tables);
/// max over pairs of |IND^level(u, v)| without materializing the lists.
std::uint64_t max_index_size(const Design& design, int level);

/// Screen of segment (i, j, t, r): true iff each of the g_0 blocks lies in
/// at least one negative screen test.
bool screen_permutation(const PartitionedDesign& design, const Outcomes& outcomes, std::uint32_t i,
                        std::uint32_t j, std::uint32_t t, std::uint32_t r, std::uint64_t* checks = nullptr);

/// Partitioned decoding: per pair, pick the first permutation whose r = 1
/// screen passes, then run rounds r = 1..c' with the overflow cap and keep
/// the first round that completes.
DecodeResult decode_partitioned(const PartitionedDesign& design, const Outcomes& outcomes);

}  // namespace ergl
