#include "ergl/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ergl/error.hpp"
#include "ergl/philox.hpp"

namespace ergl {

int floor_log2(std::uint64_t x) {
  if (x == 0) throw ParameterError("floor_log2 of zero");
  return 63 - std::countl_zero(x);
}

int ceil_log2(std::uint64_t x) {
  if (x == 0) throw ParameterError("ceil_log2 of zero");
  return x == 1 ? 0 : 64 - std::countl_zero(x - 1);
}

int ceil_log2_sqrt(double kbar) {
  int level = 0;
  double four_pow = 1.0;
  while (four_pow < kbar * (1.0 - 1e-12)) {
    four_pow *= 4.0;
    ++level;
  }
  return level;
}

std::uint64_t ceil_count(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("invalid count " + std::to_string(x));
  return static_cast<std::uint64_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

Graph::Graph(Vertex n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw ParameterError("self-loop at vertex " + std::to_string(e.u));
    if (e.u < 1 || e.v > n_) {
      throw ParameterError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                           ") outside [1, " + std::to_string(n_) + "]");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw ParameterError("duplicate edge (" + std::to_string(dup->u) + "," +
                         std::to_string(dup->v) + ")");
  }
  index_.reserve(edges_.size());
  for (const auto& e : edges_) index_.insert(pack_pair(e.u, e.v));
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (u > v) std::swap(u, v);
  return index_.contains(pack_pair(u, v));
}

double pair_count(Vertex n) { return 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0); }

SparsityParams SparsityParams::from_theta(Vertex n, double theta) {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0, 1)");
  const double pairs = pair_count(n);
  const double q = std::min(1.0, std::pow(static_cast<double>(n), 2.0 * theta) / pairs);
  return {theta, n, q, q * pairs};
}

SparsityParams SparsityParams::from_q(Vertex n, double q) {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("q must lie in [0, 1]");
  const double kbar = q * pair_count(n);
  const double theta = kbar > 1.0 ? std::log(kbar) / (2.0 * std::log(static_cast<double>(n))) : 0.0;
  return {theta, n, q, kbar};
}

std::uint64_t pair_rank(Vertex n, Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  if (u < 1 || v > n || u == v) throw RangeError("pair_rank: invalid pair");
  const std::uint64_t a = u - 1;
  return a * (2 * std::uint64_t{n} - a - 1) / 2 + (v - u - 1);
}

Graph sample_er_graph(Vertex n, double q, std::uint64_t seed) {
  if (n < 2) throw ParameterError("sample_er_graph: n must be at least 2");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("sample_er_graph: q must lie in [0, 1]");
  const PhiloxKey key = philox_key(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(q * pair_count(n) * 1.1) + 16);
  std::uint64_t rank = 0;
  PhiloxBlock block{};
  for (Vertex u = 1; u < n; ++u) {
    for (Vertex v = u + 1; v <= n; ++v, ++rank) {
      const std::uint64_t s = rank >> 1;
      if ((rank & 1) == 0) {
        block = philox4x32({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32), 0,
                            static_cast<std::uint32_t>(StreamTag::kEdge)},
                           key);
      }
      const std::uint64_t word =
          (rank & 1) == 0 ? join64(block[0], block[1]) : join64(block[2], block[3]);
      if (unit_double(word) < q) edges.push_back({u, v});
    }
  }
  return Graph(n, std::move(edges));
}

Graph pad_to_power_of_two(const Graph& graph) {
  if (is_power_of_two(graph.n())) return graph;
  const Vertex padded = Vertex{1} << ceil_log2(graph.n());
  return Graph(padded, {graph.edges().begin(), graph.edges().end()});
}

std::uint32_t block_of(Vertex vertex, int level, Vertex n) {
  if (!is_power_of_two(n)) throw ParameterError("block_of: n must be a power of two");
  const int top = floor_log2(n);
  if (level < 0 || level > top) throw RangeError("block_of: level out of range");
  if (vertex < 1 || vertex > n) throw RangeError("block_of: vertex out of range");
  return ((vertex - 1) >> (top - level)) + 1;
}

LevelStats level_stats(const Graph& graph, int level) {
  const Vertex n = graph.n();
  if (!is_power_of_two(n)) throw ParameterError("level_stats: graph must be padded");
  const int top = floor_log2(n);
  if (level < 0 || level > top) throw RangeError("level_stats: level out of range");
  const int shift = top - level;
  const std::uint64_t g = std::uint64_t{1} << level;

  std::vector<char> defective(g, 0);
  std::vector<std::uint64_t> cross;
  cross.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    const std::uint32_t bu = (e.u - 1) >> shift;
    const std::uint32_t bv = (e.v - 1) >> shift;
    if (bu == bv) {
      defective[bu] = 1;
    } else {
      cross.push_back(pack_pair(bu, bv));
    }
  }
  std::sort(cross.begin(), cross.end());
  cross.erase(std::unique(cross.begin(), cross.end()), cross.end());

  LevelStats stats;
  stats.level = level;
  stats.g = g;
  stats.nu_g = static_cast<std::uint64_t>(std::count(defective.begin(), defective.end(), 1));
  const std::uint64_t nu = stats.nu_g;
  // Every pair touching a defective block is a block-graph edge.
  stats.eg_count = nu * (g - 1) - nu * (nu - 1) / 2;
  std::vector<std::uint64_t> clean_degree(g, 0);
  for (const auto packed : cross) {
    const Edge p = unpack_pair(packed);
    if (defective[p.u] || defective[p.v]) continue;
    ++stats.eg_count;
    ++clean_degree[p.u];
    ++clean_degree[p.v];
  }
  for (std::uint64_t b = 0; b < g; ++b) {
    if (!defective[b]) stats.dmax_nondef = std::max(stats.dmax_nondef, nu + clean_degree[b]);
  }
  return stats;
}

TypicalityReport typicality_check(const Graph& graph, const SparsityParams& params, double eps) {
  if (params.n != graph.n()) throw ParameterError("typicality_check: params.n does not match graph");
  if (!is_power_of_two(graph.n())) throw ParameterError("typicality_check: graph must be padded");
  if (!(eps >= 0.0)) throw ParameterError("typicality_check: eps must be non-negative");

  TypicalityReport report;
  report.eps = eps;
  report.kbar = params.kbar;
  report.k = graph.edge_count();
  const double k = static_cast<double>(report.k);
  report.cond_i = (1.0 - eps) * params.kbar <= k && k <= (1.0 + eps) * params.kbar;

  const int top = floor_log2(graph.n());
  const int first = params.kbar >= 1.0 ? ceil_log2_sqrt(params.kbar) : top + 1;
  report.degenerate = params.kbar < 1.0 || first > top;

  const double kbar = params.kbar;
  const bool dense = params.theta > 0.5;
  bool all_levels = true;
  if (!report.degenerate) {
    for (int level = first; level <= top; ++level) {
      LevelTypicality row;
      row.stats = level_stats(graph, level);
      const double g = static_cast<double>(row.stats.g);
      if (dense) {
        row.e_max = 4.0 * kbar;
        row.nu_max = 2.0 * kbar / g;
        row.d_max = 10.0 * kbar / g;
      } else {
        const double lk = std::log(kbar);
        row.e_max = 2.0 * kbar * lk * lk;
        row.nu_max = 2.0 * std::sqrt(kbar);
        row.d_max = 8.0 * std::sqrt(kbar);
      }
      row.edges_ok = static_cast<double>(row.stats.eg_count) <= row.e_max;
      row.nu_ok = static_cast<double>(row.stats.nu_g) <= row.nu_max;
      row.degree_ok = static_cast<double>(row.stats.dmax_nondef) <= row.d_max;
      all_levels = all_levels && row.ok();
      report.levels.push_back(row);
    }
  }
  report.overall = report.cond_i && all_levels;
  return report;
}

}  // namespace ergl
