#pragma once

// Non-adaptive binary-splitting test designs.
//
// A design is a compact value: parameters plus a seed. Each (stage,
// iteration, block) assignment is recomputed on demand from the Philox
// stream, so nothing proportional to the number of tests is stored except
// the outcome bits themselves.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergl/graph.hpp"
#include "ergl/philox.hpp"

namespace ergl {

enum class DesignMode { theory, calibrated };

std::string to_string(DesignMode mode);
DesignMode parse_design_mode(const std::string& text);

struct DesignParams {
  double C1 = 3.0;
  double C2 = 9.0;
  double Cprime = 2.0;
  double C3 = 9.0;
  std::uint32_t c = 3;
  std::uint32_t cprime = 3;
  double gamma = 0.3;
  DesignMode mode = DesignMode::calibrated;

  /// Constants used by the binary-splitting design. Theory mode enforces
  /// C1 > 27, C2 = C1^2 and C' > 3.
  void validate() const;
  /// Adds C3 >= 3e, c > 1/gamma and c' > 2/gamma in theory mode.
  void validate_partitioned() const;

  /// Smallest round-numbered constants satisfying the theory inequalities.
  static DesignParams theory(double gamma = 0.3);

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

/// Tests at one level: `iterations` rounds of `tests_per_iteration` tests.
struct LevelTests {
  int level = 0;
  std::uint64_t iterations = 0;
  std::uint64_t tests_per_iteration = 0;

  std::uint64_t total() const { return iterations * tests_per_iteration; }
};

struct TestCount {
  int level_min = 0;
  int level_final = 0;
  std::uint64_t per_level_iterations = 0;  // R = ceil(C2 sqrt(kbar))
  std::uint64_t tests_per_iteration = 0;   // T = ceil(C1 sqrt(kbar))
  std::uint64_t final_rounds = 0;          // F = ceil(C' ln n)
  std::vector<LevelTests> levels;          // level_min .. level_final
  std::uint64_t total = 0;
};

/// Closed-form test count of the binary-splitting design:
/// (L - l_min) R T + F R T with l_min = clamp(ceil(log2 sqrt(kbar)), 1, L).
TestCount count_tests(std::uint64_t n, double kbar, const DesignParams& params);
/// Same layout with the first level forced to `level_start`.
TestCount count_tests_from(std::uint64_t n, double kbar, const DesignParams& params, int level_start);

/// A contiguous run of tests: `iterations` rounds at block resolution
/// `level`, each round assigning every block to one of `tests_per_iteration`
/// tests. `stream` names the assignment draws.
struct Stage {
  int level = 0;
  std::uint32_t iterations = 0;
  std::uint32_t tests_per_iteration = 0;
  std::uint64_t first_test = 0;
  std::uint32_t stream = 0;

  std::uint64_t test_count() const { return std::uint64_t{iterations} * tests_per_iteration; }
  std::uint64_t test_id(std::uint32_t iteration, std::uint32_t slot) const {
    return first_test + std::uint64_t{iteration} * tests_per_iteration + slot;
  }
  bool contains_test(std::uint64_t id) const { return id >= first_test && id - first_test < test_count(); }

  friend bool operator==(const Stage&, const Stage&) = default;
};

/// Slot (0-based) of 0-based block `block` in round `iteration` of the stream:
/// word (block & 3) of Philox(counter = (stream, iteration, block >> 2, kAssignment)).
std::uint32_t assignment_slot(const PhiloxKey& key, std::uint32_t stream, std::uint32_t iteration,
                              std::uint32_t block, std::uint32_t tests);
/// Slots for blocks [0, blocks) in one round; equal to assignment_slot per block.
void fill_assignment(const PhiloxKey& key, const Stage& stage, std::uint32_t iteration,
                     std::uint32_t blocks, std::vector<std::uint32_t>& slots);

/// One bit per global test id.
class Outcomes {
 public:
  explicit Outcomes(std::uint64_t total = 0) : total_(total), words_((total + 63) / 64, 0) {}

  std::uint64_t size() const { return total_; }
  bool test(std::uint64_t id) const { return (words_[id >> 6] >> (id & 63)) & 1u; }
  bool at(std::uint64_t id) const;
  void set(std::uint64_t id) { words_[id >> 6] |= std::uint64_t{1} << (id & 63); }
  std::uint64_t positives() const;
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const Outcomes&, const Outcomes&) = default;

 private:
  std::uint64_t total_;
  std::vector<std::uint64_t> words_;
};

/// Endpoints as 0-based labels of a local vertex space of size 2^log2n.
struct LocalEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

/// Marks every test of `stage` that contains some edge. An edge lies in a
/// test iff both endpoint blocks sit in it: internal edges mark their
/// block's slot, cross edges mark the shared slot when the blocks collide.
void mark_stage(const PhiloxKey& key, const Stage& stage, int log2n, std::span<const LocalEdge> edges,
                Outcomes& outcomes, std::vector<std::uint32_t>& scratch);

/// The binary-splitting design on [1, n]: one stage per level l_min..log2 n.
class Design {
 public:
  Design() = default;
  Design(std::uint32_t n, double kbar, const DesignParams& params, std::uint64_t seed);

  std::uint32_t n() const { return n_; }
  int log2n() const { return log2n_; }
  double kbar() const { return kbar_; }
  const DesignParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const PhiloxKey& key() const { return key_; }
  int level_min() const { return level_min_; }
  int level_final() const { return log2n_; }
  std::uint64_t final_rounds() const { return final_rounds_; }

  std::span<const Stage> stages() const { return stages_; }
  const Stage& stage(int level) const;
  /// Stage holding a global test id (RangeError if none).
  const Stage& stage_of_test(std::uint64_t test_id) const;
  std::uint64_t total_tests() const { return total_tests_; }

  /// 0-based slot of 1-based `block` at `level` in round `iteration`.
  std::uint32_t slot(int level, std::uint32_t iteration, std::uint32_t block) const;

  friend bool operator==(const Design& a, const Design& b) {
    return a.n_ == b.n_ && a.kbar_ == b.kbar_ && a.params_ == b.params_ && a.seed_ == b.seed_;
  }

 private:
  std::uint32_t n_ = 0;
  int log2n_ = 0;
  double kbar_ = 0.0;
  DesignParams params_;
  std::uint64_t seed_ = 0;
  PhiloxKey key_{};
  int level_min_ = 0;
  std::uint64_t final_rounds_ = 0;
  std::vector<Stage> stages_;
  std::uint64_t total_tests_ = 0;
};

/// n must be a power of two (>= 2) and kbar >= 1.
Design build_design(std::uint32_t n, double kbar, const DesignParams& params, std::uint64_t seed);

/// Edge-detecting outcomes: a test is positive iff it contains both
/// endpoints of some edge.
Outcomes simulate_outcomes(const Design& design, const Graph& graph);

/// Sorted vertex set of a test (union of its member blocks).
std::vector<Vertex> vertices_in_test(const Design& design, std::uint64_t test_id);
/// Test ids containing `block` at `level`, one per round, in round order.
std::vector<std::uint64_t> tests_of_block(const Design& design, int level, std::uint32_t block);

}  // namespace ergl
