#pragma once

// Seeded Monte-Carlo trials, sweeps, scaling fits and constant calibration.
// Trial i of a config uses seed seed0 + i for both the graph and the design;
// the two draw from different Philox streams.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ergl/decoder.hpp"
#include "ergl/design.hpp"
#include "ergl/graph.hpp"

namespace ergl {

enum class Algorithm { basic, tables, partitioned };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct TrialConfig {
  std::uint32_t n = 1024;
  double theta = 0.5;
  std::optional<double> q;  // overrides theta when set
  DesignParams params;
  Algorithm algorithm = Algorithm::basic;
  std::uint32_t trials = 1;
  std::uint64_t seed0 = 1;

  SparsityParams sparsity() const;
  /// kbar used to size the design; an empty-graph config still gets kbar = 1.
  double design_kbar() const;
  /// Test count of the design this config builds.
  std::uint64_t tests() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool success = false;   // estimate equals the edge set exactly
  bool superset = false;  // estimate contains every edge
  std::uint64_t true_edges = 0;
  std::uint64_t found_edges = 0;
  std::uint64_t tests = 0;
  std::uint64_t checks = 0;
  std::uint64_t max_pd = 0;
  DecodeStatus status = DecodeStatus::completed;
  std::uint64_t wall_ns = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Deterministic per (config, index); wall time is left at 0 unless `timed`.
TrialRecord run_trial(const TrialConfig& config, std::uint32_t index, bool timed = true);

/// Trials 0..config.trials-1 spread over `workers` threads, returned in
/// index order.
std::vector<TrialRecord> run_trials(const TrialConfig& config, unsigned workers = 1, bool timed = true);

struct SweepRow {
  TrialConfig config;
  TrialRecord record;
};

std::vector<SweepRow> sweep(const std::vector<TrialConfig>& configs, unsigned workers = 1, bool timed = true);

std::string csv_header();
std::string csv_row(const SweepRow& row);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Least-squares fit of log(y / ln n) = slope * log(kbar) + intercept.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  double rms = 0.0;
};

/// Needs at least 4 distinct kbar values and positive y.
ScalingFit fit_scaling(const std::vector<double>& kbar, const std::vector<double>& y,
                       const std::vector<double>& n);
/// Fit of outcome checks against kbar over sweep rows.
ScalingFit fit_scaling(const std::vector<SweepRow>& rows);

struct CalibrationGrid {
  std::vector<double> C1{3.0};
  std::vector<double> C2{9.0};
  std::vector<double> Cprime{2.0};
  std::vector<double> C3{9.0};
  std::vector<std::uint32_t> c{3};
  std::vector<std::uint32_t> cprime{3};

  /// Every combination, gamma and mode taken from `base`.
  std::vector<DesignParams> combos(const DesignParams& base) const;
};

struct CalibrationCandidate {
  DesignParams params;
  std::uint64_t tests = 0;                // summed over the pilot blocks
  std::vector<std::uint32_t> successes;  // per pilot block evaluated so far
  std::vector<std::uint32_t> trials;

  /// Lowest success rate over the evaluated pilot blocks.
  double rate() const;
};

struct CalibrationResult {
  CalibrationCandidate chosen;
  std::vector<CalibrationCandidate> evaluated;  // in evaluation order
};

/// Tries the grid's combos in increasing test-count order and returns the
/// first whose success rate reaches `target` on every pilot block (each
/// block fixes n, theta, algorithm, trials and seed0; its params are
/// replaced by the combo). A combo is dropped at its first failing block.
/// ConfigError naming the best combo seen if none qualifies.
CalibrationResult calibrate(const std::vector<TrialConfig>& pilots, const CalibrationGrid& grid, double target,
                            unsigned workers = 1);
CalibrationResult calibrate(const TrialConfig& pilot, const CalibrationGrid& grid, double target,
                            unsigned workers = 1);

}  // namespace ergl
