#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace ergl {

using Vertex = std::uint32_t;

/// Unordered vertex pair stored canonically with u < v (1-based ids).
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

constexpr std::uint64_t pack_pair(std::uint32_t u, std::uint32_t v) {
  return (std::uint64_t{u} << 32) | v;
}
constexpr Edge unpack_pair(std::uint64_t packed) {
  return {static_cast<Vertex>(packed >> 32), static_cast<Vertex>(packed)};
}

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// floor(log2 x) for x >= 1.
int floor_log2(std::uint64_t x);
/// ceil(log2 x) for x >= 1.
int ceil_log2(std::uint64_t x);
/// Smallest level l >= 0 with 2^l >= sqrt(kbar), i.e. ceil(log2 sqrt(kbar)).
int ceil_log2_sqrt(double kbar);
/// ceil(x) tolerant to rounding noise just above an integer.
std::uint64_t ceil_count(double x);

/// A simple undirected graph on [1, n]. Immutable after construction.
class Graph {
 public:
  Graph() = default;
  /// Canonicalizes (u, v) ordering and sorts; rejects self-loops, duplicates
  /// and out-of-range endpoints with ParameterError.
  Graph(Vertex n, std::vector<Edge> edges);

  Vertex n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  bool has_edge(Vertex u, Vertex v) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  Vertex n_ = 0;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> index_;
};

/// ER sparsity parameters: kbar = q * n(n-1)/2.
struct SparsityParams {
  double theta = 0.0;
  Vertex n = 0;
  double q = 0.0;
  double kbar = 0.0;

  /// q = min(1, n^{2 theta} / C(n,2)).
  static SparsityParams from_theta(Vertex n, double theta);
  /// theta is recovered as ln(kbar) / (2 ln n) (0 when kbar <= 1).
  static SparsityParams from_q(Vertex n, double q);
};

double pair_count(Vertex n);

/// Samples ER(n, q). Pair (u, v) with lexicographic rank r (0-based over
/// u < v) is included iff the r-th Bernoulli draw of the kEdge stream is 1;
/// ranks 2s and 2s+1 share the Philox block with counter (s_lo, s_hi, 0, kEdge).
Graph sample_er_graph(Vertex n, double q, std::uint64_t seed);

/// Lexicographic rank of (u, v), u < v, among all pairs of [1, n].
std::uint64_t pair_rank(Vertex n, Vertex u, Vertex v);

/// Adds isolated vertices up to the next power of two.
Graph pad_to_power_of_two(const Graph& graph);

/// Block containing `vertex` at `level` (g = 2^level blocks of n/g vertices).
std::uint32_t block_of(Vertex vertex, int level, Vertex n);

struct LevelStats {
  int level = 0;
  std::uint64_t g = 0;
  std::uint64_t nu_g = 0;         // defective blocks
  std::uint64_t eg_count = 0;     // block-graph edges |E_g|
  std::uint64_t dmax_nondef = 0;  // max block-graph degree over non-defective blocks
};

LevelStats level_stats(const Graph& graph, int level);

struct LevelTypicality {
  LevelStats stats;
  double e_max = 0.0;
  double nu_max = 0.0;
  double d_max = 0.0;
  bool edges_ok = false;
  bool nu_ok = false;
  bool degree_ok = false;

  bool ok() const { return edges_ok && nu_ok && degree_ok; }
};

struct TypicalityReport {
  double eps = 0.0;
  double kbar = 0.0;
  std::size_t k = 0;
  bool cond_i = false;
  bool degenerate = false;
  std::vector<LevelTypicality> levels;
  bool overall = false;
};

/// Edge-count concentration plus the per-level block-graph bounds, using
/// the theta > 1/2 or theta <= 1/2 branch. log^2 kbar uses the natural log.
TypicalityReport typicality_check(const Graph& graph, const SparsityParams& params,
                                  double eps = 0.2);

}  // namespace ergl
