#include "ergl/decoder.hpp"

#include <algorithm>

#include "ergl/error.hpp"

namespace ergl {
namespace {

std::uint64_t pair_rank_in(std::uint64_t g, std::uint64_t u, std::uint64_t v) {
  return (u - 1) * (2 * g - u) / 2 + (v - u - 1);
}

void check_blocks(int level, std::uint32_t u, std::uint32_t v) {
  const std::uint64_t g = std::uint64_t{1} << level;
  if (u == v || u < 1 || v < 1 || u > g || v > g) throw RangeError("block pair out of range for its level");
}

// Blocks grouped by slot for one round: members of slot s are
// order[start[s] .. start[s + 1]).
struct SlotBuckets {
  std::vector<std::uint32_t> start;
  std::vector<std::uint32_t> order;

  void build(std::span<const std::uint32_t> slots, std::uint32_t tests) {
    start.assign(std::size_t{tests} + 1, 0);
    for (const auto s : slots) ++start[s + 1];
    for (std::uint32_t s = 0; s < tests; ++s) start[s + 1] += start[s];
    order.resize(slots.size());
    std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
    for (std::uint32_t b = 0; b < slots.size(); ++b) order[cursor[slots[b]]++] = b;
  }
};

template <typename Visit>
void for_each_colliding_pair(const PhiloxKey& key, const Stage& stage, std::vector<std::uint32_t>& slots,
                             SlotBuckets& buckets, Visit&& visit) {
  const std::uint32_t blocks = std::uint32_t{1} << stage.level;
  for (std::uint32_t it = 0; it < stage.iterations; ++it) {
    fill_assignment(key, stage, it, blocks, slots);
    buckets.build(slots, stage.tests_per_iteration);
    for (std::uint32_t s = 0; s < stage.tests_per_iteration; ++s) {
      for (std::uint32_t x = buckets.start[s]; x < buckets.start[s + 1]; ++x) {
        for (std::uint32_t y = x + 1; y < buckets.start[s + 1]; ++y) {
          visit(it, s, buckets.order[x] + 1, buckets.order[y] + 1);
        }
      }
    }
  }
}

std::vector<Edge> unpack_all(std::span<const std::uint64_t> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto p : pairs) edges.push_back(unpack_pair(p));
  return edges;
}

}  // namespace

std::string to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::completed:
      return "completed";
    case DecodeStatus::overflow_terminated:
      return "overflow-terminated";
    case DecodeStatus::screen_failed:
      return "screen-failed";
  }
  return "unknown";
}

DecodeStatus parse_decode_status(const std::string& text) {
  if (text == "completed") return DecodeStatus::completed;
  if (text == "overflow-terminated") return DecodeStatus::overflow_terminated;
  if (text == "screen-failed") return DecodeStatus::screen_failed;
  throw FormatError("unknown decode status '" + text + "'");
}

bool PDSet::contains(std::uint32_t u, std::uint32_t v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(pairs.begin(), pairs.end(), pack_pair(u, v));
}

PDSet full_pd_set(int level) {
  if (level < 1 || level > 31) throw RangeError("full_pd_set: level out of range");
  const std::uint32_t g = std::uint32_t{1} << level;
  PDSet pd;
  pd.level = level;
  pd.pairs.reserve(std::size_t{g} * (g - 1) / 2);
  for (std::uint32_t u = 1; u <= g; ++u) {
    for (std::uint32_t v = u + 1; v <= g; ++v) pd.pairs.push_back(pack_pair(u, v));
  }
  return pd;
}

std::array<Edge, 6> split_pair(std::uint32_t u, std::uint32_t v) {
  if (u == v) throw ParameterError("split_pair: blocks must differ");
  if (u > v) std::swap(u, v);
  const std::uint32_t u1 = 2 * u - 1, u2 = 2 * u, v1 = 2 * v - 1, v2 = 2 * v;
  return {Edge{u1, v1}, Edge{u1, v2}, Edge{u2, v1}, Edge{u2, v2}, Edge{u1, u2}, Edge{v1, v2}};
}

PDSet split_all(const PDSet& pd) {
  PDSet next;
  next.level = pd.level + 1;
  next.pairs.reserve(pd.pairs.size() * 6);
  for (const auto packed : pd.pairs) {
    const Edge p = unpack_pair(packed);
    for (const auto& child : split_pair(p.u, p.v)) next.pairs.push_back(pack_pair(child.u, child.v));
  }
  std::sort(next.pairs.begin(), next.pairs.end());
  next.pairs.erase(std::unique(next.pairs.begin(), next.pairs.end()), next.pairs.end());
  return next;
}

std::uint64_t DecodeResult::max_pd() const {
  return pd_sizes.empty() ? 0 : *std::max_element(pd_sizes.begin(), pd_sizes.end());
}

bool pair_cleared(const Design& design, const Outcomes& outcomes, int level, std::uint32_t u, std::uint32_t v,
                  std::uint64_t* checks) {
  const Stage& stage = design.stage(level);
  check_blocks(level, u, v);
  if (outcomes.size() != design.total_tests()) throw ParameterError("pair_cleared: outcomes do not match design");
  for (std::uint32_t it = 0; it < stage.iterations; ++it) {
    if (checks) ++*checks;
    const std::uint32_t su = assignment_slot(design.key(), stage.stream, it, u - 1, stage.tests_per_iteration);
    const std::uint32_t sv = assignment_slot(design.key(), stage.stream, it, v - 1, stage.tests_per_iteration);
    if (su == sv && !outcomes.test(stage.test_id(it, su))) return true;
  }
  return false;
}

std::uint64_t retain_uncleared(const PhiloxKey& key, const Stage& stage, const Outcomes& outcomes,
                               std::vector<std::uint64_t>& pairs) {
  const std::uint32_t blocks = std::uint32_t{1} << stage.level;
  std::uint64_t checks = 0;
  std::vector<std::uint32_t> slots;
  for (std::uint32_t it = 0; it < stage.iterations && !pairs.empty(); ++it) {
    checks += pairs.size();
    const std::uint64_t base = stage.test_id(it, 0);
    std::size_t kept = 0;
    if (std::uint64_t{blocks} <= 8 * pairs.size()) {
      fill_assignment(key, stage, it, blocks, slots);
      for (const auto packed : pairs) {
        const std::uint32_t su = slots[(packed >> 32) - 1];
        const std::uint32_t sv = slots[static_cast<std::uint32_t>(packed) - 1];
        if (su != sv || outcomes.test(base + su)) pairs[kept++] = packed;
      }
    } else {
      for (const auto packed : pairs) {
        const auto u = static_cast<std::uint32_t>(packed >> 32) - 1;
        const auto v = static_cast<std::uint32_t>(packed) - 1;
        const std::uint32_t su = assignment_slot(key, stage.stream, it, u, stage.tests_per_iteration);
        const std::uint32_t sv = assignment_slot(key, stage.stream, it, v, stage.tests_per_iteration);
        if (su != sv || outcomes.test(base + su)) pairs[kept++] = packed;
      }
    }
    pairs.resize(kept);
  }
  return checks;
}

DecodeResult decode_basic(const Design& design, const Outcomes& outcomes) {
  if (outcomes.size() != design.total_tests()) throw ParameterError("decode_basic: outcomes do not match design");
  DecodeResult result;
  result.first_level = design.level_min();
  PDSet pd = full_pd_set(design.level_min());
  for (const auto& stage : design.stages()) {
    result.pd_sizes.push_back(pd.size());
    result.outcome_checks += retain_uncleared(design.key(), stage, outcomes, pd.pairs);
    if (stage.level < design.level_final()) pd = split_all(pd);
  }
  result.edges = unpack_all(pd.pairs);
  return result;
}

IndexTables::IndexTables(const Design& design)
    : n_(design.n()),
      kbar_(design.kbar()),
      params_(design.params()),
      seed_(design.seed()),
      level_min_(design.level_min()),
      level_final_(design.level_final()) {
  std::vector<std::uint32_t> slots;
  SlotBuckets buckets;
  for (const auto& stage : design.stages()) {
    const std::uint64_t g = std::uint64_t{1} << stage.level;
    Level level;
    level.offsets.assign(g * (g - 1) / 2 + 1, 0);
    for_each_colliding_pair(design.key(), stage, slots, buckets,
                            [&](std::uint32_t, std::uint32_t, std::uint32_t u, std::uint32_t v) {
                              ++level.offsets[pair_rank_in(g, u, v) + 1];
                            });
    for (std::size_t r = 1; r < level.offsets.size(); ++r) level.offsets[r] += level.offsets[r - 1];
    level.ids.resize(level.offsets.back());
    std::vector<std::uint64_t> cursor(level.offsets.begin(), level.offsets.end() - 1);
    for_each_colliding_pair(design.key(), stage, slots, buckets,
                            [&](std::uint32_t it, std::uint32_t s, std::uint32_t u, std::uint32_t v) {
                              level.ids[cursor[pair_rank_in(g, u, v)]++] = stage.test_id(it, s);
                            });
    levels_.push_back(std::move(level));
  }
}

std::span<const std::uint64_t> IndexTables::tests(int level, std::uint32_t u, std::uint32_t v) const {
  if (level < level_min_ || level > level_final_) throw RangeError("index tables: level out of range");
  check_blocks(level, u, v);
  if (u > v) std::swap(u, v);
  const Level& table = levels_[static_cast<std::size_t>(level - level_min_)];
  const std::uint64_t r = pair_rank_in(std::uint64_t{1} << level, u, v);
  return std::span<const std::uint64_t>(table.ids).subspan(table.offsets[r], table.offsets[r + 1] - table.offsets[r]);
}

std::uint64_t IndexTables::max_size(int level) const {
  if (level < level_min_ || level > level_final_) throw RangeError("index tables: level out of range");
  const Level& table = levels_[static_cast<std::size_t>(level - level_min_)];
  std::uint64_t best = 0;
  for (std::size_t r = 0; r + 1 < table.offsets.size(); ++r) {
    best = std::max(best, table.offsets[r + 1] - table.offsets[r]);
  }
  return best;
}

std::uint64_t IndexTables::entry_count() const {
  std::uint64_t total = 0;
  for (const auto& level : levels_) total += level.ids.size();
  return total;
}

bool IndexTables::matches(const Design& design) const {
  return n_ == design.n() && kbar_ == design.kbar() && params_ == design.params() && seed_ == design.seed();
}

IndexTables precompute_index_tables(const Design& design) { return IndexTables(design); }

DecodeResult decode_with_tables(const Design& design, const Outcomes& outcomes, const IndexTables& tables) {
  if (!tables.matches(design)) throw ParameterError("decode_with_tables: tables were built for another design");
  if (outcomes.size() != design.total_tests()) throw ParameterError("decode_with_tables: outcomes do not match design");
  DecodeResult result;
  result.first_level = design.level_min();
  PDSet pd = full_pd_set(design.level_min());
  for (int level = design.level_min(); level <= design.level_final(); ++level) {
    result.pd_sizes.push_back(pd.size());
    std::size_t kept = 0;
    for (const auto packed : pd.pairs) {
      const Edge p = unpack_pair(packed);
      bool cleared = false;
      for (const auto id : tables.tests(level, p.u, p.v)) {
        ++result.outcome_checks;
        if (!outcomes.test(id)) {
          cleared = true;
          break;
        }
      }
      if (!cleared) pd.pairs[kept++] = packed;
    }
    pd.pairs.resize(kept);
    if (level < design.level_final()) pd = split_all(pd);
  }
  result.edges = unpack_all(pd.pairs);
  return result;
}

std::uint64_t max_index_size(const Design& design, int level) {
  const Stage& stage = design.stage(level);
  const std::uint64_t g = std::uint64_t{1} << level;
  std::vector<std::uint32_t> counts(g * (g - 1) / 2, 0);
  std::vector<std::uint32_t> slots;
  SlotBuckets buckets;
  for_each_colliding_pair(design.key(), stage, slots, buckets,
                          [&](std::uint32_t, std::uint32_t, std::uint32_t u, std::uint32_t v) {
                            ++counts[pair_rank_in(g, u, v)];
                          });
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

}  // namespace ergl
