#pragma once

// Text formats. Every writer/reader pair round-trips byte for byte.
//
//   graph     "n=<N>" then one "u v" line per edge
//   design    key=value header; kbar stored as an exact fraction
//   export    one "test_id: v1 v2 ..." line per test
//   outcomes  "total=<N>" then one hex line, nibble k holding bits 4k..4k+3
//   perm      "m a b"
//   config    key=value lines, '#' comments

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "ergl/decoder.hpp"
#include "ergl/design.hpp"
#include "ergl/field.hpp"
#include "ergl/graph.hpp"
#include "ergl/partitioned_design.hpp"

namespace ergl {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
void write_key_values(std::ostream& out, const KeyValues& values);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);
std::uint64_t parse_u64(const std::string& text);

void write_graph(std::ostream& out, const Graph& graph);
Graph read_graph(std::istream& in);

/// kbar = num / den with den a power of two; exact for every double >= 1.
struct ExactRatio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};
ExactRatio exact_ratio(double x);

/// Design constants as config keys (C1, C2, Cp, C3, c, cp, gamma, mode).
/// Missing keys keep the values of `base`.
DesignParams params_from_key_values(const KeyValues& values, const DesignParams& base = {});
void params_to_key_values(const DesignParams& params, KeyValues& values);

enum class DesignKind { basic, partitioned };
std::string to_string(DesignKind kind);
DesignKind parse_design_kind(const std::string& text);

struct DesignHeader {
  DesignKind kind = DesignKind::basic;
  std::uint32_t n = 0;
  double kbar = 0.0;
  DesignParams params;
  std::uint64_t seed = 0;

  Design build_basic() const;
  PartitionedDesign build_partitioned() const;
  std::uint64_t total_tests() const;
};

void write_design_header(std::ostream& out, const DesignHeader& header);
DesignHeader read_design_header(std::istream& in);
DesignHeader header_of(const Design& design);
DesignHeader header_of(const PartitionedDesign& design);

/// Full expansion: one line per test id.
void write_export(std::ostream& out, const DesignHeader& header);

void write_outcomes(std::ostream& out, const Outcomes& outcomes);
Outcomes read_outcomes(std::istream& in);

void write_perm(std::ostream& out, const AffinePermutation& perm);
AffinePermutation read_perm(std::istream& in);

/// Decoder metrics sidecar.
void write_metrics(std::ostream& out, const DecodeResult& result);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace ergl
