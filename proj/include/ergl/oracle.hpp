#pragma once

// Reference implementations used as correctness oracles. Everything here
// works from fully expanded vertex lists and materialized pair sets; none of
// it calls into the decoders.

#include <cstdint>
#include <vector>

#include "ergl/design.hpp"
#include "ergl/graph.hpp"
#include "ergl/partitioned_design.hpp"

namespace ergl {

using TestList = std::vector<std::vector<Vertex>>;

/// Every test of the design as a sorted vertex list, indexed by test id.
TestList expand_tests(const Design& design);
TestList expand_tests(const PartitionedDesign& design);

/// Outcome of each test by scanning its vertex set against every edge.
Outcomes naive_simulate(const TestList& tests, const Graph& graph);

/// The coarse-to-fine recursion recomputed with std::set pair sets and the
/// expanded test of every outcome bit.
std::vector<Edge> naive_reference_decode(const Design& design, const Outcomes& outcomes);

/// The partitioned decoder's contract recomputed from expanded tests: per
/// pair, first passing screen at r = 1, first completed round under the cap.
std::vector<Edge> naive_partitioned_decode(const PartitionedDesign& design, const Outcomes& outcomes);

/// Pair-elimination baseline: (u, v) is declared an edge iff no negative
/// test contains both u and v.
std::vector<Edge> comp_decode(Vertex n, const TestList& tests, const Outcomes& outcomes);

}  // namespace ergl
