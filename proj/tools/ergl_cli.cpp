// Command-line front end: graph generation, design files, simulation,
// decoding, Monte-Carlo trials and sweeps, calibration.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "ergl/decoder.hpp"
#include "ergl/error.hpp"
#include "ergl/field.hpp"
#include "ergl/harness.hpp"
#include "ergl/io.hpp"

namespace {

using namespace ergl;

struct ParamFlags {
  std::string config;
  std::optional<double> C1, C2, Cp, C3, gamma;
  std::optional<std::uint32_t> c, cp;
  std::optional<std::string> mode;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key=value file with design constants");
    app->add_option("--C1", C1, "tests per round multiplier");
    app->add_option("--C2", C2, "rounds per level multiplier");
    app->add_option("--Cp", Cp, "final-level round multiplier");
    app->add_option("--C3", C3, "screen test multiplier");
    app->add_option("--c", c, "permutation count");
    app->add_option("--cp", cp, "repetition count");
    app->add_option("--gamma", gamma, "partition exponent");
    app->add_option("--mode", mode, "theory or calibrated");
  }

  DesignParams resolve() const {
    DesignParams p;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw Error("cannot open config '" + config + "'");
      p = params_from_key_values(parse_key_values(in));
    }
    if (mode) p.mode = parse_design_mode(*mode);
    if (p.mode == DesignMode::theory && config.empty()) p = DesignParams::theory(gamma.value_or(p.gamma));
    if (C1) p.C1 = *C1;
    if (C2) p.C2 = *C2;
    if (Cp) p.Cprime = *Cp;
    if (C3) p.C3 = *C3;
    if (c) p.c = *c;
    if (cp) p.cprime = *cp;
    if (gamma) p.gamma = *gamma;
    return p;
  }
};

struct Output {
  std::string path;
  void add(CLI::App* app) { app->add_option("--out", path, "output file (default stdout)"); }
  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
    } else {
      write_file(path, text);
    }
  }
};

std::istringstream open(const std::string& path) { return std::istringstream(read_file(path)); }

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning sparse random graphs from non-adaptive edge-detecting tests"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "sample an Erdos-Renyi graph");
  std::uint32_t gen_n = 1024;
  double gen_theta = 0.5;
  std::optional<double> gen_q;
  std::uint64_t gen_seed = 1;
  bool gen_pad = false;
  Output gen_out;
  gen->add_option("--n", gen_n, "vertex count")->capture_default_str();
  gen->add_option("--theta", gen_theta, "sparsity exponent")->capture_default_str();
  gen->add_option("--q", gen_q, "edge probability (overrides theta)");
  gen->add_option("--seed", gen_seed, "seed")->capture_default_str();
  gen->add_flag("--pad", gen_pad, "pad to a power of two");
  gen_out.add(gen);

  // design
  auto* design = app.add_subcommand("design", "write a design header");
  std::uint32_t design_n = 1024;
  std::optional<double> design_kbar;
  double design_theta = 0.5;
  std::string design_kind = "basic";
  std::uint64_t design_seed = 1;
  ParamFlags design_params;
  Output design_out;
  design->add_option("--n", design_n, "vertex count")->capture_default_str();
  design->add_option("--kbar", design_kbar, "expected edge count (overrides theta)");
  design->add_option("--theta", design_theta, "sparsity exponent")->capture_default_str();
  design->add_option("--kind", design_kind, "basic or partitioned")->capture_default_str();
  design->add_option("--seed", design_seed, "seed")->capture_default_str();
  design_params.add(design);
  design_out.add(design);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "compute test outcomes for a graph");
  std::string sim_design, sim_graph;
  Output sim_out;
  simulate->add_option("--design", sim_design, "design header file")->required();
  simulate->add_option("--graph", sim_graph, "graph file")->required();
  sim_out.add(simulate);

  // decode
  auto* decode = app.add_subcommand("decode", "recover the edge set from outcomes");
  std::string dec_design, dec_outcomes, dec_algo = "basic", dec_metrics;
  Output dec_out;
  decode->add_option("--design", dec_design, "design header file")->required();
  decode->add_option("--outcomes", dec_outcomes, "outcomes file")->required();
  decode->add_option("--algo", dec_algo, "basic or tables (basic designs)")->capture_default_str();
  decode->add_option("--metrics", dec_metrics, "metrics sidecar path");
  dec_out.add(decode);

  // trial / sweep share the config flags
  auto* trial = app.add_subcommand("trial", "run one seeded trial and print its CSV row");
  auto* sweep_cmd = app.add_subcommand("sweep", "run trials over a grid of (algo, n, theta)");
  TrialConfig base;
  std::string algo = "basic";
  ParamFlags trial_params;
  std::uint32_t trial_index = 0;
  bool no_timing = false;
  unsigned workers = default_workers();
  Output trial_out;
  trial->add_option("--n", base.n, "vertex count")->capture_default_str();
  trial->add_option("--theta", base.theta, "sparsity exponent")->capture_default_str();
  trial->add_option("--q", base.q, "edge probability (overrides theta)");
  trial->add_option("--algo", algo, "basic, tables or partitioned")->capture_default_str();
  trial->add_option("--seed0", base.seed0, "base seed")->capture_default_str();
  trial->add_option("--index", trial_index, "trial index")->capture_default_str();
  trial->add_flag("--no-timing", no_timing, "write ns=0");
  trial_params.add(trial);
  trial_out.add(trial);

  std::vector<std::uint32_t> sweep_n{1024};
  std::vector<double> sweep_theta{0.5};
  std::vector<std::string> sweep_algo{"basic"};
  std::uint32_t sweep_trials = 10;
  std::uint64_t sweep_seed0 = 1;
  bool sweep_fit = false;
  ParamFlags sweep_params;
  Output sweep_out;
  sweep_cmd->add_option("--n", sweep_n, "vertex counts")->capture_default_str();
  sweep_cmd->add_option("--theta", sweep_theta, "sparsity exponents")->capture_default_str();
  sweep_cmd->add_option("--algo", sweep_algo, "algorithms")->capture_default_str();
  sweep_cmd->add_option("--trials", sweep_trials, "trials per combination")->capture_default_str();
  sweep_cmd->add_option("--seed0", sweep_seed0, "base seed")->capture_default_str();
  sweep_cmd->add_option("--workers", workers, "worker threads")->capture_default_str();
  sweep_cmd->add_flag("--no-timing", no_timing, "write ns=0 so output is reproducible byte for byte");
  sweep_cmd->add_flag("--fit", sweep_fit, "print the fitted checks-vs-kbar exponent per algorithm to stderr");
  sweep_params.add(sweep_cmd);
  sweep_out.add(sweep_cmd);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "search constants reaching a target success rate");
  TrialConfig pilot;
  std::vector<std::string> cal_algo{"basic"};
  CalibrationGrid grid;
  double target = 0.95;
  ParamFlags cal_params;
  Output cal_out;
  pilot.trials = 20;
  cal->add_option("--n", pilot.n, "vertex count")->capture_default_str();
  cal->add_option("--theta", pilot.theta, "sparsity exponent")->capture_default_str();
  cal->add_option("--algo", cal_algo, "algorithms; a combo must pass every one")->capture_default_str();
  cal->add_option("--trials", pilot.trials, "pilot trials per combination")->capture_default_str();
  cal->add_option("--seed0", pilot.seed0, "pilot base seed")->capture_default_str();
  cal->add_option("--target", target, "required success rate")->capture_default_str();
  cal->add_option("--workers", workers, "worker threads")->capture_default_str();
  cal->add_option("--grid-C1", grid.C1, "C1 values")->capture_default_str();
  cal->add_option("--grid-C2", grid.C2, "C2 values")->capture_default_str();
  cal->add_option("--grid-Cp", grid.Cprime, "C' values")->capture_default_str();
  cal->add_option("--grid-C3", grid.C3, "C3 values")->capture_default_str();
  cal->add_option("--grid-c", grid.c, "c values")->capture_default_str();
  cal->add_option("--grid-cp", grid.cprime, "c' values")->capture_default_str();
  cal_params.add(cal);
  cal_out.add(cal);

  // perm-census
  auto* census = app.add_subcommand("perm-census", "exhaustive pairwise-independence census");
  unsigned census_m = 3;
  std::optional<std::uint64_t> census_seed;
  Output census_out;
  census->add_option("--m", census_m, "field degree (1..5 for the census)")->capture_default_str();
  census->add_option("--sample", census_seed, "instead print the permutation sampled from this seed");
  census_out.add(census);

  // export
  auto* exp = app.add_subcommand("export", "expand a design into one line per test");
  std::string exp_design;
  Output exp_out;
  exp->add_option("--design", exp_design, "design header file")->required();
  exp_out.add(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    std::ostringstream text;
    if (gen->parsed()) {
      const SparsityParams sp = gen_q ? SparsityParams::from_q(gen_n, *gen_q) : SparsityParams::from_theta(gen_n, gen_theta);
      Graph graph = sample_er_graph(gen_n, sp.q, gen_seed);
      if (gen_pad) graph = pad_to_power_of_two(graph);
      write_graph(text, graph);
      gen_out.emit(text.str());
    } else if (design->parsed()) {
      DesignHeader header;
      header.kind = parse_design_kind(design_kind);
      header.n = design_n;
      header.kbar = design_kbar ? *design_kbar : std::max(1.0, SparsityParams::from_theta(design_n, design_theta).kbar);
      header.params = design_params.resolve();
      header.seed = design_seed;
      header.total_tests();  // validates the combination
      write_design_header(text, header);
      design_out.emit(text.str());
    } else if (simulate->parsed()) {
      auto din = open(sim_design);
      auto gin = open(sim_graph);
      const DesignHeader header = read_design_header(din);
      const Graph graph = read_graph(gin);
      if (header.kind == DesignKind::basic) {
        write_outcomes(text, simulate_outcomes(header.build_basic(), graph));
      } else {
        write_outcomes(text, simulate_outcomes(header.build_partitioned(), graph));
      }
      sim_out.emit(text.str());
    } else if (decode->parsed()) {
      auto din = open(dec_design);
      auto oin = open(dec_outcomes);
      const DesignHeader header = read_design_header(din);
      const Outcomes outcomes = read_outcomes(oin);
      DecodeResult result;
      if (header.kind == DesignKind::partitioned) {
        result = decode_partitioned(header.build_partitioned(), outcomes);
      } else {
        const Design d = header.build_basic();
        const Algorithm a = parse_algorithm(dec_algo);
        if (a == Algorithm::partitioned) throw ParameterError("decode: design file describes a basic design");
        result = a == Algorithm::basic ? decode_basic(d, outcomes) : decode_with_tables(d, outcomes, precompute_index_tables(d));
      }
      write_graph(text, Graph(header.n, result.edges));
      dec_out.emit(text.str());
      if (!dec_metrics.empty()) {
        std::ostringstream metrics;
        write_metrics(metrics, result);
        write_file(dec_metrics, metrics.str());
      }
    } else if (trial->parsed()) {
      base.algorithm = parse_algorithm(algo);
      base.params = trial_params.resolve();
      const SweepRow row{base, run_trial(base, trial_index, !no_timing)};
      write_csv(text, {row});
      trial_out.emit(text.str());
    } else if (sweep_cmd->parsed()) {
      const DesignParams params = sweep_params.resolve();
      std::vector<TrialConfig> configs;
      for (const auto& a : sweep_algo) {
        for (const auto n : sweep_n) {
          for (const auto theta : sweep_theta) {
            TrialConfig c;
            c.n = n;
            c.theta = theta;
            c.params = params;
            c.algorithm = parse_algorithm(a);
            c.trials = sweep_trials;
            c.seed0 = sweep_seed0;
            configs.push_back(c);
          }
        }
      }
      const auto rows = sweep(configs, workers, !no_timing);
      write_csv(text, rows);
      sweep_out.emit(text.str());
      if (sweep_fit) {
        for (const auto& a : sweep_algo) {
          std::vector<SweepRow> subset;
          for (const auto& r : rows) {
            if (to_string(r.config.algorithm) == a) subset.push_back(r);
          }
          const ScalingFit fit = fit_scaling(subset);
          std::cerr << a << ": slope=" << fit.slope << " intercept=" << fit.intercept << " rms=" << fit.rms << '\n';
        }
      }
    } else if (cal->parsed()) {
      pilot.params = cal_params.resolve();
      std::vector<TrialConfig> pilots;
      for (const auto& a : cal_algo) {
        pilots.push_back(pilot);
        pilots.back().algorithm = parse_algorithm(a);
      }
      const CalibrationResult result = calibrate(pilots, grid, target, workers);
      for (const auto& e : result.evaluated) {
        std::cerr << "C1=" << e.params.C1 << " C2=" << e.params.C2 << " Cp=" << e.params.Cprime << " C3=" << e.params.C3
                  << " c=" << e.params.c << " cp=" << e.params.cprime << " tests=" << e.tests << " success=";
        for (std::size_t k = 0; k < e.trials.size(); ++k) {
          std::cerr << (k ? "," : "") << cal_algo[k] << ':' << e.successes[k] << '/' << e.trials[k];
        }
        std::cerr << '\n';
      }
      KeyValues values;
      params_to_key_values(result.chosen.params, values);
      text << "# pilot: n=" << pilot.n << " theta=" << pilot.theta << " trials=" << pilot.trials << " seed0=" << pilot.seed0;
      for (std::size_t k = 0; k < cal_algo.size(); ++k) {
        text << ' ' << cal_algo[k] << '=' << result.chosen.successes[k] << '/' << result.chosen.trials[k];
      }
      text << '\n';
      write_key_values(text, values);
      cal_out.emit(text.str());
    } else if (census->parsed()) {
      if (census_seed) {
        write_perm(text, sample_perm(FieldSpec::standard(census_m), *census_seed));
      } else {
        const IndependenceCensus table = independence_census(census_m);
        text << "m=" << census_m << " min=" << table.min() << " max=" << table.max()
             << " all_ones=" << (table.all_ones() ? 1 : 0) << '\n';
      }
      census_out.emit(text.str());
    } else if (exp->parsed()) {
      auto din = open(exp_design);
      write_export(text, read_design_header(din));
      exp_out.emit(text.str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
