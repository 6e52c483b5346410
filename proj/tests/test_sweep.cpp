#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "kinex/error.hpp"
#include "kinex/indicators.hpp"
#include "kinex/io.hpp"
#include "kinex/sweep.hpp"
#include "support.hpp"

using namespace kinex;

namespace {

constexpr double kMu = 143.5;

SweepCell synthetic(double dt, double gamma, double g, double m) {
  SweepCell c;
  c.delta_tau = dt;
  c.gamma = gamma;
  c.gini = g;
  c.mobility = m;
  c.converged = true;
  return c;
}

}  // namespace

TEST_CASE("rate pairs around the default center") {
  const auto a = RatePair::centered(0.15);
  CHECK(a.tau_min == doctest::Approx(0.30));
  CHECK(a.tau_max == doctest::Approx(0.45));
  const auto b = RatePair::centered(0.35);
  CHECK(b.tau_min == doctest::Approx(0.20));
  CHECK(b.tau_max == doctest::Approx(0.55));
  CHECK(b.spread() == doctest::Approx(0.35));
}

TEST_CASE("single-cell sweep equals run_cell") {
  const ModelConfig base;
  const IntegrationSettings settings;
  const std::vector<double> dts{0.25};
  const std::vector<double> gammas{0.3};
  const auto cells = sweep_grid(base, dts, gammas, kMu, settings);
  REQUIRE(cells.size() == 1);
  const auto cell = run_cell(base, RatePair::centered(0.25), 0.3, kMu, settings);
  CHECK(cells[0].converged);
  CHECK(cells[0].gini == cell.gini);
  CHECK(cells[0].mobility == cell.mobility);
  CHECK(cells[0].x == cell.x);
  CHECK(cells[0].tau_min == doctest::Approx(0.25));
  CHECK(cells[0].tau_max == doctest::Approx(0.50));
}

TEST_CASE("sweep ordering, threading and monotonicity in the spread") {
  const ModelConfig base;
  const IntegrationSettings settings;
  const std::vector<double> dts{0.10, 0.20, 0.30};
  const std::vector<double> gammas{0.2, 0.4};
  const auto serial = sweep_grid(base, dts, gammas, kMu, settings, 1);
  const auto parallel = sweep_grid(base, dts, gammas, kMu, settings, 4);
  REQUIRE(serial.size() == 6);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].delta_tau == doctest::Approx(dts[i / 2]));
    CHECK(serial[i].gamma == gammas[i % 2]);
    CHECK(serial[i].gini == parallel[i].gini);
    CHECK(serial[i].mobility == parallel[i].mobility);
  }
  for (std::size_t g = 0; g < 2; ++g) {
    CHECK(serial[2 + g].gini < serial[g].gini);
    CHECK(serial[4 + g].gini < serial[2 + g].gini);
  }
  const auto report = correlation_report(serial);
  CHECK(report.cells == 6);
  CHECK(report.pearson < -0.9);
  CHECK(report.increments_opposite);
  CHECK(report.along_gamma.size() == 3);
  CHECK(report.along_delta_tau.size() == 4);

  std::ostringstream csv;
  io::write_sweep_csv(csv, serial);
  std::istringstream in(csv.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("sweep rejects invalid parameters before solving") {
  const ModelConfig base;
  const std::vector<double> dts{0.15};
  const std::vector<double> bad_gamma{0.3, 0.7};
  test::expect_code(ErrorCode::invalid_argument,
                    [&] { sweep_grid(base, dts, bad_gamma, kMu, IntegrationSettings{}); });
  const std::vector<double> none;
  test::expect_code(ErrorCode::invalid_argument, [&] { sweep_grid(base, none, dts, kMu, IntegrationSettings{}); });
  const std::vector<double> too_wide{0.9};
  const std::vector<double> gammas{0.3};
  test::expect_code(ErrorCode::invalid_argument,
                    [&] { sweep_grid(base, too_wide, gammas, kMu, IntegrationSettings{}); });
}

TEST_CASE("unconverged cells are reported, not thrown") {
  IntegrationSettings short_run;
  short_run.max_time = 5.0;
  const auto cell = run_cell(ModelConfig{}, RatePair::centered(0.15), 0.3, kMu, short_run);
  CHECK_FALSE(cell.converged);
  CHECK_FALSE(cell.failure.empty());
  CHECK(std::isnan(cell.gini));
  CHECK(cell.residual > 0.0);
}

TEST_CASE("pearson and the correlation report") {
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));

  // Level-line tables: G and M at the nine tabulated points.
  const std::vector<double> g{0.341, 0.341, 0.341, 0.338, 0.338, 0.338, 0.335, 0.335, 0.335};
  const std::vector<double> m{0.002700, 0.002704, 0.002707, 0.002712, 0.002714,
                              0.002717, 0.002723, 0.002723, 0.002727};
  CHECK(pearson(g, m) < -0.9);

  std::vector<SweepCell> flat{synthetic(0.1, 0.2, 0.3, 0.001), synthetic(0.1, 0.3, 0.3, 0.002),
                              synthetic(0.2, 0.2, 0.3, 0.003)};
  const auto degenerate = correlation_report(flat);
  CHECK(degenerate.degenerate);
  CHECK(std::isnan(degenerate.pearson));

  std::vector<SweepCell> two{synthetic(0.1, 0.2, 0.3, 0.001), synthetic(0.1, 0.3, 0.31, 0.002)};
  test::expect_code(ErrorCode::invalid_argument, [&] { correlation_report(two); });

  std::vector<SweepCell> mixed{synthetic(0.1, 0.2, 0.35, 0.001), synthetic(0.1, 0.3, 0.34, 0.002),
                               synthetic(0.2, 0.2, 0.33, 0.003), synthetic(0.2, 0.3, 0.32, 0.002)};
  const auto r = correlation_report(mixed);
  CHECK_FALSE(r.increments_opposite);
  CHECK(r.along_gamma.size() == 2);
  CHECK(r.along_gamma[1].product == doctest::Approx(-0.01 * -0.001));

  mixed.push_back(synthetic(0.3, 0.3, 0.0, 0.0));
  mixed.back().converged = false;
  CHECK(correlation_report(mixed).cells == 4);
}

TEST_CASE("calibration") {
  const ModelConfig base;
  const IntegrationSettings settings;
  const CalibrationTarget target;
  const auto result = calibrate_mu(base, target, 130.0, 160.0, settings);
  CHECK(std::abs(result.gini - 0.368) <= 1e-4);
  CHECK(result.iterations > 0);

  const ModelParams params(base);
  const auto eq = solve_equilibrium(params, result.mu, settings);
  CHECK(std::abs(gini(params.grid(), eq.x) - result.gini) <= 1e-6);

  CalibrationTarget unreachable;
  unreachable.target_gini = 0.9;
  try {
    calibrate_mu(base, unreachable, 130.0, 160.0, settings);
    FAIL("expected calibration failure");
  } catch (const CalibrationError& e) {
    CHECK(e.code() == ErrorCode::calibration_failure);
    CHECK(e.g_at_lower() > e.g_at_upper());
  }
  test::expect_code(ErrorCode::invalid_argument, [&] { calibrate_mu(base, target, 160.0, 130.0, settings); });
}

TEST_CASE("level line on two spreads") {
  LevelLineOptions opts;
  opts.threads = 2;
  const std::vector<double> dts{0.25, 0.15};
  const auto line = trace_level_line(ModelConfig{}, 0.338, dts, kMu, IntegrationSettings{}, opts);
  REQUIRE(line.points.size() == 2);
  CHECK(line.warnings.empty());
  CHECK(line.points[0].delta_tau == doctest::Approx(0.15));
  CHECK(line.points[1].delta_tau == doctest::Approx(0.25));
  for (const auto& p : line.points) CHECK(std::abs(p.gini - 0.338) <= opts.tolerance);
  CHECK(line.points[1].gamma > line.points[0].gamma);

  std::ostringstream table;
  io::write_level_line_table(table, line, "B");
  CHECK(table.str().find("30") != std::string::npos);

  const std::vector<double> dup{0.15, 0.15};
  test::expect_code(ErrorCode::invalid_argument,
                    [&] { trace_level_line(ModelConfig{}, 0.338, dup, kMu, IntegrationSettings{}, opts); });
  const std::vector<double> none;
  test::expect_code(ErrorCode::invalid_argument,
                    [&] { trace_level_line(ModelConfig{}, 0.338, none, kMu, IntegrationSettings{}, opts); });
}
