#include "ergl/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "ergl/error.hpp"
#include "ergl/oracle.hpp"

namespace ergl {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::string& require(const KeyValues& values, const std::string& key) {
  const auto it = values.find(key);
  if (it == values.end()) throw FormatError("missing key '" + key + "'");
  return it->second;
}

std::uint32_t parse_u32(const std::string& text) {
  const std::uint64_t v = parse_u64(text);
  if (v > 0xFFFFFFFFu) throw FormatError("value out of 32-bit range: '" + text + "'");
  return static_cast<std::uint32_t>(v);
}

int hex_value(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  return -1;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw FormatError("line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw FormatError("line " + std::to_string(number) + ": empty key");
    if (!values.emplace(key, trim(text.substr(eq + 1))).second) {
      throw FormatError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  return values;
}

void write_key_values(std::ostream& out, const KeyValues& values) {
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
}

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, end);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) throw FormatError("not a number: '" + text + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw FormatError("not an unsigned integer: '" + text + "'");
  }
  return value;
}

void write_graph(std::ostream& out, const Graph& graph) {
  out << "n=" << graph.n() << '\n';
  for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("graph: missing header");
  line = trim(line);
  if (line.rfind("n=", 0) != 0) throw FormatError("graph: header must be n=<N>");
  const std::uint32_t n = parse_u32(line.substr(2));
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) throw FormatError("graph: bad edge line '" + line + "'");
    edges.push_back({parse_u32(a), parse_u32(b)});
  }
  return Graph(n, std::move(edges));
}

ExactRatio exact_ratio(double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw ParameterError("exact_ratio: value must be finite and >= 1");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  auto num = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
  int den_exp = 53 - exponent;
  while (den_exp > 0 && (num & 1u) == 0) {
    num >>= 1;
    --den_exp;
  }
  if (den_exp < 0) {
    if (-den_exp >= std::countl_zero(num)) throw ParameterError("exact_ratio: value too large");
    num <<= -den_exp;
    den_exp = 0;
  }
  return {num, std::uint64_t{1} << den_exp};
}

DesignParams params_from_key_values(const KeyValues& values, const DesignParams& base) {
  DesignParams p = base;
  const auto get = [&](const char* key, auto& field) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(field)>, double>) {
      field = parse_double(it->second);
    } else {
      field = parse_u32(it->second);
    }
  };
  get("C1", p.C1);
  get("C2", p.C2);
  get("Cp", p.Cprime);
  get("C3", p.C3);
  get("c", p.c);
  get("cp", p.cprime);
  get("gamma", p.gamma);
  if (const auto it = values.find("mode"); it != values.end()) p.mode = parse_design_mode(it->second);
  return p;
}

void params_to_key_values(const DesignParams& params, KeyValues& values) {
  values["C1"] = format_double(params.C1);
  values["C2"] = format_double(params.C2);
  values["Cp"] = format_double(params.Cprime);
  values["C3"] = format_double(params.C3);
  values["c"] = std::to_string(params.c);
  values["cp"] = std::to_string(params.cprime);
  values["gamma"] = format_double(params.gamma);
  values["mode"] = to_string(params.mode);
}

std::string to_string(DesignKind kind) { return kind == DesignKind::basic ? "basic" : "partitioned"; }

DesignKind parse_design_kind(const std::string& text) {
  if (text == "basic") return DesignKind::basic;
  if (text == "partitioned") return DesignKind::partitioned;
  throw FormatError("unknown design kind '" + text + "'");
}

Design DesignHeader::build_basic() const {
  if (kind != DesignKind::basic) throw ParameterError("design header describes a partitioned design");
  return Design(n, kbar, params, seed);
}

PartitionedDesign DesignHeader::build_partitioned() const {
  if (kind != DesignKind::partitioned) throw ParameterError("design header describes a basic design");
  return PartitionedDesign(n, kbar, params, seed);
}

std::uint64_t DesignHeader::total_tests() const {
  return kind == DesignKind::basic ? build_basic().total_tests() : build_partitioned().total_tests();
}

void write_design_header(std::ostream& out, const DesignHeader& header) {
  KeyValues values;
  const ExactRatio kbar = exact_ratio(header.kbar);
  values["kind"] = to_string(header.kind);
  values["n"] = std::to_string(header.n);
  values["kbar_num"] = std::to_string(kbar.num);
  values["kbar_den"] = std::to_string(kbar.den);
  values["seed"] = std::to_string(header.seed);
  params_to_key_values(header.params, values);
  write_key_values(out, values);
}

DesignHeader read_design_header(std::istream& in) {
  const KeyValues values = parse_key_values(in);
  DesignHeader header;
  header.kind = parse_design_kind(require(values, "kind"));
  header.n = parse_u32(require(values, "n"));
  const std::uint64_t num = parse_u64(require(values, "kbar_num"));
  const std::uint64_t den = parse_u64(require(values, "kbar_den"));
  if (den == 0 || !is_power_of_two(den)) {
    throw FormatError("design: kbar fraction is not exact");
  }
  header.kbar = static_cast<double>(num) / static_cast<double>(den);
  header.seed = parse_u64(require(values, "seed"));
  for (const char* key : {"C1", "C2", "Cp", "C3", "c", "cp", "gamma", "mode"}) require(values, key);
  header.params = params_from_key_values(values);
  return header;
}

DesignHeader header_of(const Design& design) {
  return {DesignKind::basic, design.n(), design.kbar(), design.params(), design.seed()};
}

DesignHeader header_of(const PartitionedDesign& design) {
  return {DesignKind::partitioned, design.n(), design.kbar(), design.params(), design.seed()};
}

void write_export(std::ostream& out, const DesignHeader& header) {
  const auto emit = [&](std::uint64_t id, const std::vector<Vertex>& vertices) {
    out << id << ':';
    for (const auto v : vertices) out << ' ' << v;
    out << '\n';
  };
  if (header.kind == DesignKind::basic) {
    const Design design = header.build_basic();
    for (std::uint64_t id = 0; id < design.total_tests(); ++id) emit(id, vertices_in_test(design, id));
  } else {
    const PartitionedDesign design = header.build_partitioned();
    for (std::uint64_t id = 0; id < design.total_tests(); ++id) emit(id, vertices_in_test(design, id));
  }
}

void write_outcomes(std::ostream& out, const Outcomes& outcomes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  out << "total=" << outcomes.size() << '\n';
  std::string hex((outcomes.size() + 3) / 4, '0');
  for (std::uint64_t k = 0; k < hex.size(); ++k) {
    unsigned nibble = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::uint64_t id = 4 * k + b;
      if (id < outcomes.size() && outcomes.test(id)) nibble |= 1u << b;
    }
    hex[k] = kDigits[nibble];
  }
  out << hex << '\n';
}

Outcomes read_outcomes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("outcomes: missing header");
  line = trim(line);
  if (line.rfind("total=", 0) != 0) throw FormatError("outcomes: header must be total=<N>");
  const std::uint64_t total = parse_u64(line.substr(6));
  std::string hex;
  if (!std::getline(in, hex) && total > 0) throw FormatError("outcomes: missing bit line");
  hex = trim(hex);
  if (hex.size() != (total + 3) / 4) throw FormatError("outcomes: bit line has the wrong length");
  Outcomes outcomes(total);
  for (std::uint64_t k = 0; k < hex.size(); ++k) {
    const int nibble = hex_value(hex[k]);
    if (nibble < 0) throw FormatError("outcomes: bad hex digit");
    for (unsigned b = 0; b < 4; ++b) {
      if (!((nibble >> b) & 1)) continue;
      const std::uint64_t id = 4 * k + b;
      if (id >= total) throw FormatError("outcomes: padding bits must be zero");
      outcomes.set(id);
    }
  }
  return outcomes;
}

void write_perm(std::ostream& out, const AffinePermutation& perm) {
  out << perm.spec.m() << ' ' << perm.a << ' ' << perm.b << '\n';
}

AffinePermutation read_perm(std::istream& in) {
  std::string m, a, b, extra;
  if (!(in >> m >> a >> b) || (in >> extra)) throw FormatError("perm: expected 'm a b'");
  return AffinePermutation(FieldSpec::standard(parse_u32(m)), parse_u32(a), parse_u32(b));
}

void write_metrics(std::ostream& out, const DecodeResult& result) {
  out << "status=" << to_string(result.status) << '\n';
  out << "outcome_checks=" << result.outcome_checks << '\n';
  out << "edges=" << result.edges.size() << '\n';
  out << "max_pd=" << result.max_pd() << '\n';
  for (std::size_t k = 0; k < result.pd_sizes.size(); ++k) {
    out << "pd_size." << result.first_level + static_cast<int>(k) << '=' << result.pd_sizes[k] << '\n';
  }
  if (!result.failed_pairs.empty()) {
    out << "failed_pairs=";
    for (std::size_t k = 0; k < result.failed_pairs.size(); ++k) {
      out << (k ? " " : "") << result.failed_pairs[k].first << ',' << result.failed_pairs[k].second;
    }
    out << '\n';
  }
  if (result.overflowed_pairs > 0) out << "overflowed_pairs=" << result.overflowed_pairs << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace ergl
