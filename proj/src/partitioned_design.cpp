#include "ergl/partitioned_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergl/error.hpp"

namespace ergl {
namespace {

constexpr std::uint32_t kScreenStreamLevel = 0xFF;
constexpr std::uint64_t kMaxSegments = std::uint64_t{1} << 24;

std::vector<std::vector<Edge>> edges_by_pair(const PartitionedDesign& design, const Graph& graph) {
  std::vector<std::vector<Edge>> buckets(design.pair_count());
  for (const auto& e : graph.edges()) {
    const std::uint32_t pu = design.part_of(e.u);
    const std::uint32_t pv = design.part_of(e.v);
    if (pu != pv) {
      buckets[design.pair_index(pu, pv)].push_back(e);
      continue;
    }
    // An edge inside S_p belongs to every G_pj.
    for (std::uint32_t other = 1; other <= design.parts(); ++other) {
      if (other == pu) continue;
      buckets[design.pair_index(std::min(pu, other), std::max(pu, other))].push_back(e);
    }
  }
  return buckets;
}

std::vector<LocalEdge> to_local(const PartitionedDesign& design, std::span<const Edge> edges, std::uint32_t i,
                                std::uint32_t j, std::uint32_t t) {
  std::vector<LocalEdge> local;
  local.reserve(edges.size());
  for (const auto& e : edges) {
    local.push_back({design.local_label(i, j, t, e.u) - 1, design.local_label(i, j, t, e.v) - 1});
  }
  return local;
}

BlockGraphStats block_stats(std::span<const LocalEdge> edges, int log2n, int level) {
  const int shift = log2n - level;
  const std::uint64_t g = std::uint64_t{1} << level;
  std::vector<char> defective(g, 0);
  std::vector<std::uint64_t> cross;
  for (const auto& e : edges) {
    const std::uint32_t ba = e.a >> shift;
    const std::uint32_t bb = e.b >> shift;
    if (ba == bb) {
      defective[ba] = 1;
    } else {
      cross.push_back(pack_pair(std::min(ba, bb), std::max(ba, bb)));
    }
  }
  std::sort(cross.begin(), cross.end());
  cross.erase(std::unique(cross.begin(), cross.end()), cross.end());
  BlockGraphStats stats;
  stats.nu = static_cast<std::uint64_t>(std::count(defective.begin(), defective.end(), 1));
  const std::uint64_t nu = stats.nu;
  stats.edges = nu * (g - 1) - nu * (nu - 1) / 2;
  std::vector<std::uint64_t> clean_degree(g, 0);
  for (const auto packed : cross) {
    const Edge p = unpack_pair(packed);
    if (defective[p.u] || defective[p.v]) continue;
    ++stats.edges;
    ++clean_degree[p.u];
    ++clean_degree[p.v];
  }
  for (std::uint64_t b = 0; b < g; ++b) {
    stats.max_degree = std::max(stats.max_degree, defective[b] ? g - 1 : nu + clean_degree[b]);
  }
  return stats;
}

}  // namespace

std::uint32_t choose_parts(std::uint32_t n, double kbar, double gamma) {
  if (!is_power_of_two(n) || n < 4) throw ConfigError("partitioning needs n to be a power of two >= 4");
  const int max_exp = floor_log2(n) - 1;
  const double target = kbar > 0.0 ? 0.5 * (1.0 - gamma) * std::log2(kbar) : 0.0;
  int best = 1;
  double best_gap = std::abs(target - 1.0);
  for (int e = 2; e <= max_exp; ++e) {
    const double gap = std::abs(target - e);
    if (gap <= best_gap + 1e-9) {
      best = e;
      best_gap = std::min(gap, best_gap);
    }
  }
  return std::uint32_t{1} << best;
}

PartitionedDesign::PartitionedDesign(std::uint32_t n, double kbar, const DesignParams& params,
                                     std::uint64_t seed)
    : n_(n), kbar_(kbar), params_(params), seed_(seed), key_(philox_key(seed)) {
  if (!is_power_of_two(n) || n < 4) throw ConfigError("partitioned design needs n to be a power of two >= 4");
  if (!(kbar >= 1.0) || !std::isfinite(kbar)) throw ParameterError("partitioned design: kbar must be at least 1");
  params_.validate_partitioned();
  const double theta = kbar > 1.0 ? std::log(kbar) / (2.0 * std::log(static_cast<double>(n))) : 0.0;
  const double gamma_limit = theta > 0.0 ? std::min(1.0, (1.0 - theta) / (3.0 * theta)) : 1.0;
  if (!(params_.gamma < gamma_limit)) {
    throw ConfigError("gamma = " + std::to_string(params_.gamma) + " outside (0, " + std::to_string(gamma_limit) +
                      ") for theta = " + std::to_string(theta));
  }

  parts_ = choose_parts(n, kbar, params_.gamma);
  sub_n_ = 2 * n / parts_;
  sub_log2n_ = floor_log2(sub_n_);
  q_ = kbar / ergl::pair_count(n);
  sub_kbar_ = q_ * ergl::pair_count(sub_n_);

  const int raw_level0 = kbar > 1.0 ? static_cast<int>(ceil_count(2.0 * params_.gamma * std::log2(kbar))) : 0;
  level0_ = std::clamp(raw_level0, 1, sub_log2n_);
  screen_iterations_ = static_cast<std::uint32_t>(ceil_count(5.0 * std::log(static_cast<double>(n))));
  screen_tests_ = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, ceil_count(params_.C3 * sub_kbar_)));
  const std::uint64_t g0_sq = std::uint64_t{g0()} * g0();
  overflow_cap_ = std::max(ceil_count(7.0 * std::pow(kbar, 4.0 * params_.gamma)), g0_sq);

  sub_layout_ = count_tests_from(sub_n_, std::max(sub_kbar_, 1e-12), params_, level0_);
  screen_block_ = std::uint64_t{screen_iterations_} * screen_tests_;
  segment_tests_ = screen_block_ + sub_layout_.total;
  if (segment_count() >= kMaxSegments) throw ConfigError("partitioned design: too many segments");

  const FieldSpec field = FieldSpec::standard(static_cast<unsigned>(sub_log2n_));
  perms_.reserve(params_.c);
  for (std::uint32_t t = 0; t < params_.c; ++t) perms_.push_back(sample_perm(field, seed, t));
}

std::uint32_t PartitionedDesign::pair_index(std::uint32_t i, std::uint32_t j) const {
  if (!(1 <= i && i < j && j <= parts_)) throw RangeError("pair index needs 1 <= i < j <= parts");
  return (i - 1) * (2 * parts_ - i) / 2 + (j - i - 1);
}

std::pair<std::uint32_t, std::uint32_t> PartitionedDesign::pair_at(std::uint32_t index) const {
  if (index >= pair_count()) throw RangeError("pair rank out of range");
  std::uint32_t i = 1;
  while (index >= parts_ - i) {
    index -= parts_ - i;
    ++i;
  }
  return {i, i + 1 + index};
}

void PartitionedDesign::check_segment(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const {
  if (!(1 <= i && i < j && j <= parts_)) throw RangeError("segment needs 1 <= i < j <= parts");
  if (t < 1 || t > params_.c) throw RangeError("permutation index out of range");
  if (r < 1 || r > params_.cprime) throw RangeError("repetition index out of range");
}

std::uint64_t PartitionedDesign::segment_index(std::uint32_t i, std::uint32_t j, std::uint32_t t,
                                               std::uint32_t r) const {
  check_segment(i, j, t, r);
  return (std::uint64_t{pair_index(i, j)} * params_.c + (t - 1)) * params_.cprime + (r - 1);
}

Stage PartitionedDesign::screen_stage(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r) const {
  const std::uint64_t s = segment_index(i, j, t, r);
  Stage stage;
  stage.level = level0_;
  stage.iterations = screen_iterations_;
  stage.tests_per_iteration = screen_tests_;
  stage.first_test = s * segment_tests_;
  stage.stream = static_cast<std::uint32_t>(s << 8) | kScreenStreamLevel;
  return stage;
}

Stage PartitionedDesign::stage(std::uint32_t i, std::uint32_t j, std::uint32_t t, std::uint32_t r,
                               int level) const {
  const std::uint64_t s = segment_index(i, j, t, r);
  if (level < level0_ || level > sub_log2n_) throw RangeError("sub-design has no stage at that level");
  std::uint64_t offset = s * segment_tests_ + screen_block_;
  for (const auto& lt : sub_layout_.levels) {
    if (lt.level == level) {
      Stage stage;
      stage.level = level;
      stage.iterations = static_cast<std::uint32_t>(lt.iterations);
      stage.tests_per_iteration = static_cast<std::uint32_t>(lt.tests_per_iteration);
      stage.first_test = offset;
      stage.stream = static_cast<std::uint32_t>(s << 8) | static_cast<std::uint32_t>(level);
      return stage;
    }
    offset += lt.total();
  }
  throw RangeError("sub-design has no stage at that level");
}

std::vector<Stage> PartitionedDesign::segment_stages(std::uint32_t i, std::uint32_t j, std::uint32_t t,
                                                     std::uint32_t r) const {
  std::vector<Stage> stages{screen_stage(i, j, t, r)};
  for (int level = level0_; level <= sub_log2n_; ++level) stages.push_back(stage(i, j, t, r, level));
  return stages;
}

std::uint32_t PartitionedDesign::local_label(std::uint32_t i, std::uint32_t j, std::uint32_t t, Vertex x) const {
  if (t < 1 || t > params_.c) throw RangeError("permutation index out of range");
  return perm_eval_inverse(perms_[t - 1], label_map(i, j).to_local(x));
}

Vertex PartitionedDesign::global_vertex(std::uint32_t i, std::uint32_t j, std::uint32_t t,
                                        std::uint32_t label) const {
  if (t < 1 || t > params_.c) throw RangeError("permutation index out of range");
  return label_map(i, j).to_global(perm_eval(perms_[t - 1], label));
}

PartitionedDesign build_partitioned_design(std::uint32_t n, double kbar, const DesignParams& params,
                                           std::uint64_t seed) {
  return PartitionedDesign(n, kbar, params, seed);
}

std::vector<LocalEdge> subgraph_local_edges(const PartitionedDesign& design, const Graph& graph, std::uint32_t i,
                                            std::uint32_t j, std::uint32_t t) {
  const LabelMap map = design.label_map(i, j);
  std::vector<Edge> inside;
  for (const auto& e : graph.edges()) {
    if (map.contains(e.u) && map.contains(e.v)) inside.push_back(e);
  }
  return to_local(design, inside, i, j, t);
}

Outcomes simulate_outcomes(const PartitionedDesign& design, const Graph& graph) {
  if (graph.n() != design.n()) throw ParameterError("simulate_outcomes: graph size does not match design");
  Outcomes outcomes(design.total_tests());
  const auto buckets = edges_by_pair(design, graph);
  std::vector<std::uint32_t> scratch;
  for (std::uint32_t p = 0; p < design.pair_count(); ++p) {
    if (buckets[p].empty()) continue;
    const auto [i, j] = design.pair_at(p);
    for (std::uint32_t t = 1; t <= design.params().c; ++t) {
      const auto local = to_local(design, buckets[p], i, j, t);
      for (std::uint32_t r = 1; r <= design.params().cprime; ++r) {
        for (const auto& stage : design.segment_stages(i, j, t, r)) {
          mark_stage(design.key(), stage, design.sub_log2n(), local, outcomes, scratch);
        }
      }
    }
  }
  return outcomes;
}

std::vector<Vertex> vertices_in_test(const PartitionedDesign& design, std::uint64_t test_id) {
  if (test_id >= design.total_tests()) throw RangeError("test id " + std::to_string(test_id) + " out of range");
  const std::uint64_t s = test_id / design.segment_tests();
  const auto r = static_cast<std::uint32_t>(s % design.params().cprime) + 1;
  const auto t = static_cast<std::uint32_t>((s / design.params().cprime) % design.params().c) + 1;
  const auto [i, j] = design.pair_at(static_cast<std::uint32_t>(s / design.params().cprime / design.params().c));
  for (const auto& stage : design.segment_stages(i, j, t, r)) {
    if (!stage.contains_test(test_id)) continue;
    const std::uint64_t local = test_id - stage.first_test;
    const auto iteration = static_cast<std::uint32_t>(local / stage.tests_per_iteration);
    const auto slot = static_cast<std::uint32_t>(local % stage.tests_per_iteration);
    const std::uint32_t blocks = std::uint32_t{1} << stage.level;
    const std::uint32_t width = design.sub_n() >> stage.level;
    std::vector<std::uint32_t> slots;
    fill_assignment(design.key(), stage, iteration, blocks, slots);
    std::vector<Vertex> vertices;
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (slots[b] != slot) continue;
      for (std::uint32_t w = 0; w < width; ++w) vertices.push_back(design.global_vertex(i, j, t, b * width + w + 1));
    }
    std::sort(vertices.begin(), vertices.end());
    return vertices;
  }
  throw RangeError("test id not covered by its segment");
}

BlockGraphStats permuted_block_stats(const PartitionedDesign& design, const Graph& graph, std::uint32_t i,
                                     std::uint32_t j, std::uint32_t t, int level) {
  if (level < 0 || level > design.sub_log2n()) throw RangeError("permuted_block_stats: level out of range");
  const auto local = subgraph_local_edges(design, graph, i, j, t);
  return block_stats(local, design.sub_log2n(), level);
}

PartitionTypicality partition_typicality(const PartitionedDesign& design, const Graph& graph) {
  PartitionTypicality result;
  result.pairs = design.pair_count();
  const auto buckets = edges_by_pair(design, graph);
  const double kg = std::pow(design.kbar(), design.params().gamma);
  const double degree_cap = std::sqrt(design.sub_kbar());
  for (std::uint32_t p = 0; p < design.pair_count(); ++p) {
    const auto [i, j] = design.pair_at(p);
    const auto k_ij = static_cast<double>(buckets[p].size());
    if (kg <= k_ij && k_ij <= 12.0 * kg && k_ij <= 2.0 * design.sub_kbar()) ++result.c1_pass;
    bool some_clean = false;
    bool degrees_ok = true;
    for (std::uint32_t t = 1; t <= design.params().c; ++t) {
      const auto local = to_local(design, buckets[p], i, j, t);
      if (block_stats(local, design.sub_log2n(), design.level0()).nu == 0) some_clean = true;
      for (int level = design.level0(); level <= design.sub_log2n(); ++level) {
        if (static_cast<double>(block_stats(local, design.sub_log2n(), level).max_degree) > degree_cap) {
          degrees_ok = false;
        }
      }
    }
    if (some_clean) ++result.c2_pass;
    if (degrees_ok) ++result.c3_pass;
  }
  return result;
}

}  // namespace ergl
