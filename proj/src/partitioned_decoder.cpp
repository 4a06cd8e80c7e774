#include <algorithm>

#include "ergl/decoder.hpp"
#include "ergl/error.hpp"

namespace ergl {

bool screen_permutation(const PartitionedDesign& design, const Outcomes& outcomes, std::uint32_t i,
                        std::uint32_t j, std::uint32_t t, std::uint32_t r, std::uint64_t* checks) {
  if (outcomes.size() != design.total_tests()) throw ParameterError("screen_permutation: outcomes do not match design");
  const Stage stage = design.screen_stage(i, j, t, r);
  const std::uint32_t blocks = design.g0();
  std::vector<char> passed(blocks, 0);
  std::uint32_t remaining = blocks;
  std::vector<std::uint32_t> slots;
  for (std::uint32_t it = 0; it < stage.iterations && remaining > 0; ++it) {
    fill_assignment(design.key(), stage, it, blocks, slots);
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (passed[b]) continue;
      if (checks) ++*checks;
      if (!outcomes.test(stage.test_id(it, slots[b]))) {
        passed[b] = 1;
        --remaining;
      }
    }
  }
  return remaining == 0;
}

DecodeResult decode_partitioned(const PartitionedDesign& design, const Outcomes& outcomes) {
  if (outcomes.size() != design.total_tests()) throw ParameterError("decode_partitioned: outcomes do not match design");
  DecodeResult result;
  result.first_level = design.level0();
  result.pd_sizes.assign(static_cast<std::size_t>(design.sub_log2n() - design.level0() + 1), 0);
  const auto& params = design.params();
  std::vector<std::uint64_t> found;

  for (std::uint32_t p = 0; p < design.pair_count(); ++p) {
    const auto [i, j] = design.pair_at(p);
    std::uint32_t chosen = 0;
    for (std::uint32_t t = 1; t <= params.c && chosen == 0; ++t) {
      if (screen_permutation(design, outcomes, i, j, t, 1, &result.outcome_checks)) chosen = t;
    }
    if (chosen == 0) {
      result.failed_pairs.emplace_back(i, j);
      continue;
    }

    bool completed = false;
    for (std::uint32_t r = 1; r <= params.cprime && !completed; ++r) {
      PDSet pd = full_pd_set(design.level0());
      bool overflow = false;
      for (int level = design.level0(); level <= design.sub_log2n(); ++level) {
        auto& slot = result.pd_sizes[static_cast<std::size_t>(level - design.level0())];
        slot = std::max<std::uint64_t>(slot, pd.size());
        if (pd.size() > design.overflow_cap()) {
          overflow = true;
          break;
        }
        result.outcome_checks +=
            retain_uncleared(design.key(), design.stage(i, j, chosen, r, level), outcomes, pd.pairs);
        if (level < design.sub_log2n()) pd = split_all(pd);
      }
      if (overflow) continue;
      completed = true;
      for (const auto packed : pd.pairs) {
        const Edge local = unpack_pair(packed);
        Vertex a = design.global_vertex(i, j, chosen, local.u);
        Vertex b = design.global_vertex(i, j, chosen, local.v);
        if (a > b) std::swap(a, b);
        found.push_back(pack_pair(a, b));
      }
    }
    if (!completed) ++result.overflowed_pairs;
  }

  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  result.edges.reserve(found.size());
  for (const auto packed : found) result.edges.push_back(unpack_pair(packed));
  if (!result.failed_pairs.empty()) {
    result.status = DecodeStatus::screen_failed;
  } else if (result.overflowed_pairs > 0) {
    result.status = DecodeStatus::overflow_terminated;
  }
  return result;
}

}  // namespace ergl
