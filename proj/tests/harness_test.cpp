#include "ergl/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ergl/error.hpp"

namespace ergl {
namespace {

TEST(Fit, ExactPowerLaws) {
  std::vector<double> kbar{10, 40, 160, 640, 2560}, n(5, 4096.0), y15, y10;
  for (const double k : kbar) {
    y15.push_back(std::pow(k, 1.5) * std::log(4096.0));
    y10.push_back(3.0 * k * std::log(4096.0));
  }
  const ScalingFit a = fit_scaling(kbar, y15, n);
  EXPECT_NEAR(a.slope, 1.5, 1e-9);
  EXPECT_NEAR(a.intercept, 0.0, 1e-9);
  EXPECT_LT(a.rms, 1e-9);
  ASSERT_EQ(a.residuals.size(), 5u);
  const ScalingFit b = fit_scaling(kbar, y10, n);
  EXPECT_NEAR(b.slope, 1.0, 1e-9);
  EXPECT_NEAR(b.intercept, std::log(3.0), 1e-9);
}

TEST(Fit, LogNFactorRemoved) {
  std::vector<double> kbar{4, 16, 64, 256}, n{64, 256, 1024, 4096}, y;
  for (std::size_t k = 0; k < 4; ++k) y.push_back(kbar[k] * kbar[k] * std::log(n[k]));
  EXPECT_NEAR(fit_scaling(kbar, y, n).slope, 2.0, 1e-9);
}

TEST(Fit, RefusesTooFewPoints) {
  EXPECT_THROW(fit_scaling({1, 2, 3}, {1, 2, 3}, {8, 8, 8}), ParameterError);
  EXPECT_THROW(fit_scaling({1, 2, 3, 3}, {1, 2, 3, 4}, {8, 8, 8, 8}), ParameterError);
  EXPECT_THROW(fit_scaling({1, 2, 3, 4}, {1, 2, 0, 4}, {8, 8, 8, 8}), ParameterError);
  EXPECT_THROW(fit_scaling({1, 2, 3, 4}, {1, 2, 3}, {8, 8, 8, 8}), ParameterError);
}

TEST(Algorithm, TextRoundTrip) {
  for (const auto a : {Algorithm::basic, Algorithm::tables, Algorithm::partitioned}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_THROW(parse_algorithm("comp"), ParameterError);
}

TEST(TrialConfig, DerivedSparsity) {
  TrialConfig c;
  c.n = 1024;
  c.theta = 0.5;
  EXPECT_NEAR(c.sparsity().kbar, 1024.0, 1e-6);
  c.q = 0.0;
  EXPECT_EQ(c.sparsity().kbar, 0.0);
  EXPECT_EQ(c.design_kbar(), 1.0);
}

TEST(RunTrial, EmptyGraphConfig) {
  TrialConfig c;
  c.n = 256;
  c.q = 0.0;
  for (std::uint32_t k = 0; k < 5; ++k) {
    const TrialRecord r = run_trial(c, k, false);
    EXPECT_EQ(r.true_edges, 0u);
    EXPECT_EQ(r.success, r.found_edges == 0);
    EXPECT_EQ(r.tests, count_tests(256, 1.0, c.params).total);
    EXPECT_EQ(r.wall_ns, 0u);
  }
}

TEST(RunTrial, TestsMatchConfig) {
  for (const auto algo : {Algorithm::basic, Algorithm::tables, Algorithm::partitioned}) {
    TrialConfig c;
    c.n = 256;
    c.theta = 0.4;
    c.algorithm = algo;
    c.seed0 = 9;
    const TrialRecord r = run_trial(c, 0, false);
    EXPECT_EQ(r.tests, c.tests()) << to_string(algo);
    EXPECT_EQ(r.seed, 9u);
  }
}

TEST(RunTrial, DeterministicAndWorkerIndependent) {
  TrialConfig c;
  c.n = 256;
  c.theta = 0.5;
  c.trials = 8;
  c.seed0 = 100;
  const auto a = run_trials(c, 1, false);
  const auto b = run_trials(c, 3, false);
  EXPECT_EQ(a, b);
  for (std::uint32_t k = 0; k < c.trials; ++k) {
    EXPECT_EQ(a[k], run_trial(c, k, false));
    EXPECT_EQ(a[k].seed, 100u + k);
  }
}

TEST(RunTrial, BadConfigGetsContext) {
  TrialConfig c;
  c.n = 1024;
  c.theta = 0.7;
  c.algorithm = Algorithm::partitioned;
  c.params.gamma = 0.5;
  try {
    run_trial(c, 3, false);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("trial 3"), std::string::npos);
  }
}

TEST(Sweep, CsvStableAcrossWorkers) {
  std::vector<TrialConfig> configs;
  for (const double theta : {0.3, 0.5}) {
    TrialConfig c;
    c.n = 128;
    c.theta = theta;
    c.trials = 3;
    configs.push_back(c);
  }
  configs.back().algorithm = Algorithm::partitioned;
  std::ostringstream one, two;
  write_csv(one, sweep(configs, 1, false));
  write_csv(two, sweep(configs, 2, false));
  EXPECT_EQ(one.str(), two.str());
  std::istringstream lines(one.str());
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "algo,n,theta,q,kbar,C1,C2,Cp,C3,c,cp,gamma,seed,success,tests,checks,max_pd,status,ns");
  int rows = 0;
  while (std::getline(lines, row)) {
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 18);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(Sweep, FitOverRows) {
  std::vector<TrialConfig> configs;
  for (const double theta : {0.3, 0.4, 0.5, 0.6}) {
    TrialConfig c;
    c.n = 256;
    c.theta = theta;
    configs.push_back(c);
  }
  const auto rows = sweep(configs, 1, false);
  const ScalingFit fit = fit_scaling(rows);
  EXPECT_TRUE(std::isfinite(fit.slope));
  EXPECT_EQ(fit.residuals.size(), 4u);
}

TEST(Calibrate, GridOrderAndDeterminism) {
  CalibrationGrid grid;
  grid.C1 = {1, 2, 3};
  grid.C2 = {2, 6};
  grid.Cprime = {1, 4};
  grid.C3 = {9};
  grid.c = {3};
  grid.cprime = {3};
  EXPECT_EQ(grid.combos(DesignParams{}).size(), 12u);
  TrialConfig pilot;
  pilot.n = 64;
  pilot.theta = 0.5;
  pilot.trials = 20;
  const CalibrationResult a = calibrate(pilot, grid, 0.9);
  const CalibrationResult b = calibrate(pilot, grid, 0.9, 2);
  EXPECT_EQ(a.chosen.params, b.chosen.params);
  EXPECT_EQ(a.chosen.successes, b.chosen.successes);
  EXPECT_GE(a.chosen.rate(), 0.9);
  for (std::size_t k = 1; k < a.evaluated.size(); ++k) EXPECT_LE(a.evaluated[k - 1].tests, a.evaluated[k].tests);
  for (std::size_t k = 0; k + 1 < a.evaluated.size(); ++k) EXPECT_LT(a.evaluated[k].rate(), 0.9);
}

TEST(Calibrate, FailureNamesBestCombo) {
  CalibrationGrid grid;
  grid.C1 = {1};
  grid.C2 = {0.5};
  grid.Cprime = {0.2};
  TrialConfig pilot;
  pilot.n = 256;
  pilot.theta = 0.6;
  pilot.trials = 4;
  try {
    calibrate(pilot, grid, 1.0);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("C1=1"), std::string::npos);
  }
  EXPECT_THROW(calibrate(pilot, grid, 0.0), ParameterError);
  EXPECT_THROW(calibrate(std::vector<TrialConfig>{}, grid, 0.5), ParameterError);
}

}  // namespace
}  // namespace ergl
