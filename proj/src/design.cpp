#include "ergl/design.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "ergl/error.hpp"

namespace ergl {

std::string to_string(DesignMode mode) { return mode == DesignMode::theory ? "theory" : "calibrated"; }

DesignMode parse_design_mode(const std::string& text) {
  if (text == "theory") return DesignMode::theory;
  if (text == "calibrated") return DesignMode::calibrated;
  throw ParameterError("unknown design mode '" + text + "'");
}

void DesignParams::validate() const {
  if (!(C1 >= 1.0) || !std::isfinite(C1)) throw ConfigError("C1 must be at least 1");
  if (!(C2 > 0.0) || !std::isfinite(C2)) throw ConfigError("C2 must be positive");
  if (!(Cprime > 0.0) || !std::isfinite(Cprime)) throw ConfigError("C' must be positive");
  if (mode == DesignMode::theory) {
    if (!(C1 > 27.0)) throw ConfigError("theory mode requires C1 > 27");
    if (std::abs(C2 - C1 * C1) > 1e-9 * C1 * C1) throw ConfigError("theory mode requires C2 = C1^2");
    if (!(Cprime > 3.0)) throw ConfigError("theory mode requires C' > 3");
  }
}

void DesignParams::validate_partitioned() const {
  validate();
  if (!(C3 > 0.0) || !std::isfinite(C3)) throw ConfigError("C3 must be positive");
  if (c < 1 || cprime < 1) throw ConfigError("c and c' must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (mode == DesignMode::theory) {
    if (!(C3 >= 3.0 * std::numbers::e)) throw ConfigError("theory mode requires C3 >= 3e");
    if (!(c > 1.0 / gamma)) throw ConfigError("theory mode requires c > 1/gamma");
    if (!(cprime > 2.0 / gamma)) throw ConfigError("theory mode requires c' > 2/gamma");
  }
}

DesignParams DesignParams::theory(double gamma) {
  DesignParams p;
  p.C1 = 28.0;
  p.C2 = 784.0;
  p.Cprime = 4.0;
  p.C3 = 8.2;
  p.gamma = gamma;
  p.c = static_cast<std::uint32_t>(std::floor(1.0 / gamma)) + 1;
  p.cprime = static_cast<std::uint32_t>(std::floor(2.0 / gamma)) + 1;
  p.mode = DesignMode::theory;
  return p;
}

TestCount count_tests_from(std::uint64_t n, double kbar, const DesignParams& params, int level_start) {
  if (!is_power_of_two(n) || n < 2) throw ParameterError("count_tests: n must be a power of two >= 2");
  if (!(kbar > 0.0)) throw ParameterError("count_tests: kbar must be positive");
  TestCount count;
  count.level_final = floor_log2(n);
  if (level_start < 1 || level_start > count.level_final) throw ConfigError("count_tests: start level out of range");
  count.level_min = level_start;
  const double root = std::sqrt(kbar);
  count.per_level_iterations = std::max<std::uint64_t>(1, ceil_count(params.C2 * root));
  count.tests_per_iteration = std::max<std::uint64_t>(1, ceil_count(params.C1 * root));
  count.final_rounds = std::max<std::uint64_t>(1, ceil_count(params.Cprime * std::log(static_cast<double>(n))));
  const std::uint64_t per_round = count.per_level_iterations * count.tests_per_iteration;
  for (int level = count.level_min; level < count.level_final; ++level) {
    count.levels.push_back({level, count.per_level_iterations, count.tests_per_iteration});
  }
  count.levels.push_back(
      {count.level_final, count.final_rounds * count.per_level_iterations, count.tests_per_iteration});
  count.total = static_cast<std::uint64_t>(count.level_final - count.level_min) * per_round +
                count.final_rounds * per_round;
  return count;
}

TestCount count_tests(std::uint64_t n, double kbar, const DesignParams& params) {
  if (!(kbar >= 1.0)) throw ParameterError("count_tests: kbar must be at least 1");
  if (!is_power_of_two(n) || n < 2) throw ParameterError("count_tests: n must be a power of two >= 2");
  const int top = floor_log2(n);
  return count_tests_from(n, kbar, params, std::clamp(ceil_log2_sqrt(kbar), 1, top));
}

std::uint32_t assignment_slot(const PhiloxKey& key, std::uint32_t stream, std::uint32_t iteration,
                              std::uint32_t block, std::uint32_t tests) {
  const PhiloxBlock words =
      philox4x32({stream, iteration, block >> 2, static_cast<std::uint32_t>(StreamTag::kAssignment)}, key);
  return scale32(words[block & 3u], tests);
}

void fill_assignment(const PhiloxKey& key, const Stage& stage, std::uint32_t iteration, std::uint32_t blocks,
                     std::vector<std::uint32_t>& slots) {
  slots.resize((std::size_t{blocks} + 3) & ~std::size_t{3});
  for (std::uint32_t quad = 0; quad * 4 < blocks; ++quad) {
    const PhiloxBlock words = philox4x32(
        {stage.stream, iteration, quad, static_cast<std::uint32_t>(StreamTag::kAssignment)}, key);
    for (int w = 0; w < 4; ++w) slots[quad * 4 + w] = scale32(words[w], stage.tests_per_iteration);
  }
  slots.resize(blocks);
}

bool Outcomes::at(std::uint64_t id) const {
  if (id >= total_) throw RangeError("outcome id " + std::to_string(id) + " out of range");
  return test(id);
}

std::uint64_t Outcomes::positives() const {
  std::uint64_t count = 0;
  for (const auto w : words_) count += static_cast<std::uint64_t>(std::popcount(w));
  return count;
}

void mark_stage(const PhiloxKey& key, const Stage& stage, int log2n, std::span<const LocalEdge> edges,
                Outcomes& outcomes, std::vector<std::uint32_t>& scratch) {
  if (edges.empty()) return;
  const int shift = log2n - stage.level;
  const std::uint32_t blocks = std::uint32_t{1} << stage.level;
  // Filling every block costs blocks/4 Philox calls; per-endpoint lookups
  // cost two calls per edge.
  const bool fill = std::uint64_t{blocks} <= 8 * edges.size();
  for (std::uint32_t it = 0; it < stage.iterations; ++it) {
    const std::uint64_t base = stage.test_id(it, 0);
    if (fill) {
      fill_assignment(key, stage, it, blocks, scratch);
      for (const auto& e : edges) {
        const std::uint32_t ba = e.a >> shift;
        const std::uint32_t bb = e.b >> shift;
        if (ba == bb || scratch[ba] == scratch[bb]) outcomes.set(base + scratch[ba]);
      }
    } else {
      for (const auto& e : edges) {
        const std::uint32_t ba = e.a >> shift;
        const std::uint32_t bb = e.b >> shift;
        const std::uint32_t sa = assignment_slot(key, stage.stream, it, ba, stage.tests_per_iteration);
        if (ba == bb || sa == assignment_slot(key, stage.stream, it, bb, stage.tests_per_iteration)) {
          outcomes.set(base + sa);
        }
      }
    }
  }
}

Design::Design(std::uint32_t n, double kbar, const DesignParams& params, std::uint64_t seed)
    : n_(n), kbar_(kbar), params_(params), seed_(seed), key_(philox_key(seed)) {
  if (!is_power_of_two(n) || n < 2) throw ParameterError("build_design: n must be a power of two >= 2");
  if (!(kbar >= 1.0) || !std::isfinite(kbar)) throw ParameterError("build_design: kbar must be at least 1");
  params_.validate();
  log2n_ = floor_log2(n);
  level_min_ = std::clamp(ceil_log2_sqrt(kbar), 1, log2n_);
  const double root = std::sqrt(kbar);
  const std::uint64_t rounds = std::max<std::uint64_t>(1, ceil_count(params_.C2 * root));
  const std::uint64_t tests = std::max<std::uint64_t>(1, ceil_count(params_.C1 * root));
  final_rounds_ = std::max<std::uint64_t>(1, ceil_count(params_.Cprime * std::log(static_cast<double>(n))));
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (tests > kMax || rounds * final_rounds_ > kMax) throw ConfigError("build_design: design too large");

  std::uint64_t offset = 0;
  for (int level = level_min_; level <= log2n_; ++level) {
    Stage stage;
    stage.level = level;
    stage.iterations = static_cast<std::uint32_t>(level == log2n_ ? rounds * final_rounds_ : rounds);
    stage.tests_per_iteration = static_cast<std::uint32_t>(tests);
    stage.first_test = offset;
    stage.stream = static_cast<std::uint32_t>(level);
    offset += stage.test_count();
    stages_.push_back(stage);
  }
  total_tests_ = offset;
}

const Stage& Design::stage(int level) const {
  if (level < level_min_ || level > log2n_) throw RangeError("design has no stage at level " + std::to_string(level));
  return stages_[static_cast<std::size_t>(level - level_min_)];
}

const Stage& Design::stage_of_test(std::uint64_t test_id) const {
  if (test_id >= total_tests_) throw RangeError("test id " + std::to_string(test_id) + " out of range");
  auto it = std::upper_bound(stages_.begin(), stages_.end(), test_id,
                             [](std::uint64_t id, const Stage& s) { return id < s.first_test; });
  return *std::prev(it);
}

std::uint32_t Design::slot(int level, std::uint32_t iteration, std::uint32_t block) const {
  const Stage& s = stage(level);
  if (iteration >= s.iterations) throw RangeError("iteration out of range");
  if (block < 1 || block > (std::uint32_t{1} << level)) throw RangeError("block out of range");
  return assignment_slot(key_, s.stream, iteration, block - 1, s.tests_per_iteration);
}

Design build_design(std::uint32_t n, double kbar, const DesignParams& params, std::uint64_t seed) {
  return Design(n, kbar, params, seed);
}

Outcomes simulate_outcomes(const Design& design, const Graph& graph) {
  if (graph.n() != design.n()) throw ParameterError("simulate_outcomes: graph size does not match design");
  Outcomes outcomes(design.total_tests());
  std::vector<LocalEdge> edges;
  edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) edges.push_back({e.u - 1, e.v - 1});
  std::vector<std::uint32_t> scratch;
  for (const auto& stage : design.stages()) {
    mark_stage(design.key(), stage, design.log2n(), edges, outcomes, scratch);
  }
  return outcomes;
}

std::vector<Vertex> vertices_in_test(const Design& design, std::uint64_t test_id) {
  const Stage& stage = design.stage_of_test(test_id);
  const std::uint64_t local = test_id - stage.first_test;
  const auto iteration = static_cast<std::uint32_t>(local / stage.tests_per_iteration);
  const auto slot = static_cast<std::uint32_t>(local % stage.tests_per_iteration);
  const std::uint32_t blocks = std::uint32_t{1} << stage.level;
  const std::uint32_t width = design.n() >> stage.level;
  std::vector<std::uint32_t> slots;
  fill_assignment(design.key(), stage, iteration, blocks, slots);
  std::vector<Vertex> vertices;
  for (std::uint32_t b = 0; b < blocks; ++b) {
    if (slots[b] != slot) continue;
    for (std::uint32_t v = 0; v < width; ++v) vertices.push_back(b * width + v + 1);
  }
  return vertices;
}

std::vector<std::uint64_t> tests_of_block(const Design& design, int level, std::uint32_t block) {
  const Stage& stage = design.stage(level);
  if (block < 1 || block > (std::uint32_t{1} << level)) throw RangeError("tests_of_block: block out of range");
  std::vector<std::uint64_t> ids;
  ids.reserve(stage.iterations);
  for (std::uint32_t it = 0; it < stage.iterations; ++it) {
    ids.push_back(
        stage.test_id(it, assignment_slot(design.key(), stage.stream, it, block - 1, stage.tests_per_iteration)));
  }
  return ids;
}

}  // namespace ergl
