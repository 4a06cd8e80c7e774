#include "ergl/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ergl/error.hpp"
#include "ergl/io.hpp"
#include "ergl/partitioned_design.hpp"

namespace ergl {
namespace {

// Runs job(k) for k in [0, count) over `workers` threads.
template <typename Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count && !failed; k = next++) {
        try {
          job(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::basic:
      return "basic";
    case Algorithm::tables:
      return "tables";
    case Algorithm::partitioned:
      return "partitioned";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "basic") return Algorithm::basic;
  if (text == "tables") return Algorithm::tables;
  if (text == "partitioned") return Algorithm::partitioned;
  throw ParameterError("unknown algorithm '" + text + "'");
}

SparsityParams TrialConfig::sparsity() const {
  return q ? SparsityParams::from_q(n, *q) : SparsityParams::from_theta(n, theta);
}

double TrialConfig::design_kbar() const { return std::max(sparsity().kbar, 1.0); }

std::uint64_t TrialConfig::tests() const {
  if (algorithm == Algorithm::partitioned) return PartitionedDesign(n, design_kbar(), params, seed0).total_tests();
  return count_tests(n, design_kbar(), params).total;
}

TrialRecord run_trial(const TrialConfig& config, std::uint32_t index, bool timed) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord record;
  record.seed = config.seed0 + index;
  const SparsityParams sp = config.sparsity();
  const Graph graph = sample_er_graph(config.n, sp.q, record.seed);
  const double kbar = config.design_kbar();

  DecodeResult result;
  try {
    if (config.algorithm == Algorithm::partitioned) {
      const PartitionedDesign design(config.n, kbar, config.params, record.seed);
      record.tests = design.total_tests();
      result = decode_partitioned(design, simulate_outcomes(design, graph));
    } else {
      const Design design(config.n, kbar, config.params, record.seed);
      record.tests = design.total_tests();
      const Outcomes outcomes = simulate_outcomes(design, graph);
      if (config.algorithm == Algorithm::basic) {
        result = decode_basic(design, outcomes);
      } else {
        result = decode_with_tables(design, outcomes, precompute_index_tables(design));
      }
    }
  } catch (const Error& e) {
    std::ostringstream context;
    context << "trial " << index << " (algo=" << to_string(config.algorithm) << ", n=" << config.n
            << ", seed=" << record.seed << "): " << e.what();
    throw ConfigError(context.str());
  }

  const auto truth = graph.edges();
  record.true_edges = truth.size();
  record.found_edges = result.edges.size();
  record.success = std::equal(truth.begin(), truth.end(), result.edges.begin(), result.edges.end());
  record.superset = std::includes(result.edges.begin(), result.edges.end(), truth.begin(), truth.end());
  record.checks = result.outcome_checks;
  record.max_pd = result.max_pd();
  record.status = result.status;
  if (timed) {
    record.wall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count());
  }
  return record;
}

std::vector<TrialRecord> run_trials(const TrialConfig& config, unsigned workers, bool timed) {
  std::vector<TrialRecord> records(config.trials);
  parallel_for(config.trials, workers,
               [&](std::size_t k) { records[k] = run_trial(config, static_cast<std::uint32_t>(k), timed); });
  return records;
}

std::vector<SweepRow> sweep(const std::vector<TrialConfig>& configs, unsigned workers, bool timed) {
  std::vector<SweepRow> rows;
  for (const auto& config : configs) {
    for (std::uint32_t k = 0; k < config.trials; ++k) rows.push_back({config, TrialRecord{}});
  }
  std::vector<std::uint32_t> index(rows.size());
  for (std::size_t r = 0, offset = 0; r < configs.size(); offset += configs[r].trials, ++r) {
    for (std::uint32_t k = 0; k < configs[r].trials; ++k) index[offset + k] = k;
  }
  parallel_for(rows.size(), workers, [&](std::size_t r) { rows[r].record = run_trial(rows[r].config, index[r], timed); });
  return rows;
}

std::string csv_header() { return "algo,n,theta,q,kbar,C1,C2,Cp,C3,c,cp,gamma,seed,success,tests,checks,max_pd,status,ns"; }

std::string csv_row(const SweepRow& row) {
  const TrialConfig& c = row.config;
  const TrialRecord& r = row.record;
  const SparsityParams sp = c.sparsity();
  std::ostringstream out;
  out << to_string(c.algorithm) << ',' << c.n << ',' << format_double(sp.theta) << ',' << format_double(sp.q) << ','
      << format_double(sp.kbar) << ',' << format_double(c.params.C1) << ',' << format_double(c.params.C2) << ','
      << format_double(c.params.Cprime) << ',' << format_double(c.params.C3) << ',' << c.params.c << ','
      << c.params.cprime << ',' << format_double(c.params.gamma) << ',' << r.seed << ',' << (r.success ? 1 : 0)
      << ',' << r.tests << ',' << r.checks << ',' << r.max_pd << ',' << to_string(r.status) << ',' << r.wall_ns;
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
}

ScalingFit fit_scaling(const std::vector<double>& kbar, const std::vector<double>& y, const std::vector<double>& n) {
  if (kbar.size() != y.size() || kbar.size() != n.size()) throw ParameterError("fit_scaling: column lengths differ");
  if (std::set<double>(kbar.begin(), kbar.end()).size() < 4) {
    throw ParameterError("fit_scaling: need at least 4 distinct kbar values");
  }
  const auto rows = static_cast<Eigen::Index>(kbar.size());
  Eigen::MatrixXd a(rows, 2);
  Eigen::VectorXd b(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto s = static_cast<std::size_t>(k);
    if (!(kbar[s] > 0.0) || !(y[s] > 0.0) || !(n[s] > 1.0)) {
      throw ParameterError("fit_scaling: kbar and y must be positive and n > 1");
    }
    a(k, 0) = std::log(kbar[s]);
    a(k, 1) = 1.0;
    b(k) = std::log(y[s] / std::log(n[s]));
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = b - a * coef;
  ScalingFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.residuals.assign(res.data(), res.data() + res.size());
  fit.rms = std::sqrt(res.squaredNorm() / static_cast<double>(rows));
  return fit;
}

ScalingFit fit_scaling(const std::vector<SweepRow>& rows) {
  std::vector<double> kbar, y, n;
  for (const auto& row : rows) {
    kbar.push_back(row.config.sparsity().kbar);
    y.push_back(static_cast<double>(row.record.checks));
    n.push_back(static_cast<double>(row.config.n));
  }
  return fit_scaling(kbar, y, n);
}

std::vector<DesignParams> CalibrationGrid::combos(const DesignParams& base) const {
  std::vector<DesignParams> out;
  for (const double c1 : C1)
    for (const double c2 : C2)
      for (const double cp : Cprime)
        for (const double c3 : C3)
          for (const auto rc : c)
            for (const auto rcp : cprime) {
              DesignParams p = base;
              p.C1 = c1;
              p.C2 = c2;
              p.Cprime = cp;
              p.C3 = c3;
              p.c = rc;
              p.cprime = rcp;
              out.push_back(p);
            }
  return out;
}

double CalibrationCandidate::rate() const {
  if (trials.empty()) return 0.0;
  double lowest = 1.0;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    lowest = std::min(lowest, trials[k] ? static_cast<double>(successes[k]) / trials[k] : 0.0);
  }
  return lowest;
}

CalibrationResult calibrate(const std::vector<TrialConfig>& pilots, const CalibrationGrid& grid, double target,
                            unsigned workers) {
  if (!(target > 0.0 && target <= 1.0)) throw ParameterError("calibrate: target must lie in (0, 1]");
  if (pilots.empty()) throw ParameterError("calibrate: no pilot blocks");
  for (const auto& pilot : pilots) {
    if (pilot.trials == 0) throw ParameterError("calibrate: pilot block needs at least one trial");
  }
  std::vector<CalibrationCandidate> queue;
  for (const auto& params : grid.combos(pilots.front().params)) {
    CalibrationCandidate candidate;
    candidate.params = params;
    for (TrialConfig config : pilots) {
      config.params = params;
      candidate.tests += config.tests();
    }
    queue.push_back(std::move(candidate));
  }
  if (queue.empty()) throw ParameterError("calibrate: empty grid");
  std::stable_sort(queue.begin(), queue.end(), [](const auto& a, const auto& b) { return a.tests < b.tests; });

  CalibrationResult result;
  for (auto& candidate : queue) {
    bool ok = true;
    for (TrialConfig config : pilots) {
      config.params = candidate.params;
      const auto records = run_trials(config, workers, false);
      candidate.trials.push_back(config.trials);
      candidate.successes.push_back(static_cast<std::uint32_t>(
          std::count_if(records.begin(), records.end(), [](const auto& r) { return r.success; })));
      if (static_cast<double>(candidate.successes.back()) < target * config.trials) {
        ok = false;
        break;
      }
    }
    result.evaluated.push_back(candidate);
    if (ok) {
      result.chosen = candidate;
      return result;
    }
  }
  const auto best = std::max_element(result.evaluated.begin(), result.evaluated.end(), [](const auto& a, const auto& b) {
    return a.rate() < b.rate();
  });
  std::ostringstream msg;
  msg << "calibrate: no combination reached " << target << " on every pilot block; best rate " << best->rate()
      << " with C1=" << best->params.C1 << " C2=" << best->params.C2 << " Cp=" << best->params.Cprime
      << " C3=" << best->params.C3 << " c=" << best->params.c << " cp=" << best->params.cprime << " ("
      << best->tests << " tests)";
  throw ConfigError(msg.str());
}

CalibrationResult calibrate(const TrialConfig& pilot, const CalibrationGrid& grid, double target, unsigned workers) {
  return calibrate(std::vector<TrialConfig>{pilot}, grid, target, workers);
}

}  // namespace ergl
