#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "kinex/error.hpp"
#include "kinex/io.hpp"
#include "kinex/model.hpp"
#include "support.hpp"

using namespace kinex;
namespace g = kinex::guard;

TEST_CASE("grid: default family and small grids") {
  const IncomeGrid grid = build_grid(15, 25.0);
  CHECK(grid.size() == 15);
  CHECK(grid.boundary(15) == 375.0);
  CHECK(grid.average(0) == 12.5);
  CHECK(grid.average(14) == 362.5);
  for (std::size_t j = 0; j < 15; ++j) CHECK(grid.average(j) == doctest::Approx(12.5 * (2.0 * (j + 1) - 1)));
  CHECK(grid.is_linear());

  const IncomeGrid tiny = build_grid(3, 1.0);
  CHECK(std::vector<double>(tiny.boundaries().begin(), tiny.boundaries().end()) == std::vector<double>{0, 1, 2, 3});
  CHECK(std::vector<double>(tiny.averages().begin(), tiny.averages().end()) == std::vector<double>{0.5, 1.5, 2.5});
}

TEST_CASE("grid: invalid shapes") {
  test::expect_code(ErrorCode::invalid_argument, [] { build_grid(2, 25.0); });
  test::expect_code(ErrorCode::invalid_argument, [] { build_grid(15, 0.0); });
  test::expect_code(ErrorCode::invalid_argument, [] { build_grid(15, -1.0); });
  test::expect_code(ErrorCode::invalid_argument, [] { IncomeGrid({1, 2, 3, 4}); });
  test::expect_code(ErrorCode::invalid_argument, [] { IncomeGrid({0, 2, 2, 4}); });
  CHECK_FALSE(IncomeGrid({0, 8, 20, 36}).is_linear());
}

TEST_CASE("encounter matrix: rules and precedence") {
  const IncomeGrid grid = build_grid(15, 25.0);
  const EncounterMatrix p = build_encounter_matrix(grid);
  const std::size_t n = 15;
  for (std::size_t k = 0; k < n; ++k) CHECK(p(0, k) == 0.0);
  for (std::size_t h = 0; h < n; ++h) CHECK(p(h, n - 1) == 0.0);
  CHECK(p(1, 1) == doctest::Approx(37.5 / 725.0).epsilon(1e-14));
  CHECK(p(1, 1) == doctest::Approx(0.051724).epsilon(1e-5));
  CHECK(p(2, 6) == doctest::Approx(62.5 / 1450.0).epsilon(1e-14));
  CHECK(p(2, 6) == doctest::Approx(0.043103).epsilon(1e-5));
  // Bottom column and top row use the half weight; they agree at p[n][1].
  CHECK(p(5, 0) == doctest::Approx(12.5 / 725.0));
  CHECK(p(n - 1, 4) == doctest::Approx(112.5 / 725.0));
  CHECK(p(n - 1, 0) == doctest::Approx(12.5 / 725.0));
  // p[n][n] falls under the zero column rule.
  CHECK(p(n - 1, n - 1) == 0.0);
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(p(h, k) >= 0.0);
      CHECK(p(h, k) <= 1.0);
      CHECK(p(h, k) + p(k, h) <= 1.0);
    }
  }
}

TEST_CASE("encounter matrix: constraint validation") {
  test::expect_code(ErrorCode::invalid_argument, [] { EncounterMatrix(2, {0, 0.6, 0.6, 0}); });
  test::expect_code(ErrorCode::invalid_argument, [] { EncounterMatrix(2, {0, -0.1, 0, 0}); });
  test::expect_code(ErrorCode::invalid_argument, [] { EncounterMatrix(2, {0, 0, 0}); });
}

TEST_CASE("tax schedule") {
  const TaxSchedule t = build_tax_schedule(15, 0.30, 0.45);
  CHECK(t.rates.front() == doctest::Approx(0.30));
  CHECK(t.rates.back() == doctest::Approx(0.45));
  CHECK(t.rates[7] == doctest::Approx(0.375));
  CHECK(t.rates[1] == doctest::Approx(0.30 + 0.15 / 14));
  for (std::size_t j = 1; j < 15; ++j) CHECK(t.rates[j] >= t.rates[j - 1]);
  for (double r : build_tax_schedule(15, 0.3, 0.3).rates) CHECK(r == doctest::Approx(0.3));
  test::expect_code(ErrorCode::invalid_argument, [] { build_tax_schedule(15, 0.5, 0.4); });
  test::expect_code(ErrorCode::invalid_argument, [] { build_tax_schedule(15, -0.1, 0.4); });
  test::expect_code(ErrorCode::invalid_argument, [] { build_tax_schedule(15, 0.3, 1.0); });
}

TEST_CASE("welfare weights") {
  const IncomeGrid grid = build_grid(15, 25.0);
  for (double w : build_welfare_weights(grid, 0.5).weights) CHECK(w == doctest::Approx(187.5).epsilon(1e-14));
  const auto w02 = build_welfare_weights(grid, 0.2).weights;
  CHECK(w02.front() - w02.back() == doctest::Approx(210.0).epsilon(1e-14));
  for (double gamma : {0.01, 0.1, 0.25, 0.4, 0.5}) {
    const auto w = build_welfare_weights(grid, gamma).weights;
    CHECK(std::abs((w.front() - w.back()) - (362.5 - 12.5) * (1 - 2 * gamma)) < 1e-12);
    for (std::size_t j = 1; j < w.size(); ++j) CHECK(w[j] <= w[j - 1] + 1e-12);
  }
  test::expect_code(ErrorCode::invalid_argument, [&] { build_welfare_weights(grid, 0.6); });
  test::expect_code(ErrorCode::invalid_argument, [&] { build_welfare_weights(grid, 0.0); });
  test::expect_code(ErrorCode::invalid_argument,
                    [] { build_welfare_weights(IncomeGrid({0, 8, 20, 36}), 0.3); });
}

TEST_CASE("guards: transition tensor terms") {
  const std::size_t n = 5;
  // Payer from i+1 dropping into i.
  CHECK(g::payer_drops_into(0, 0, n));
  CHECK(g::payer_drops_into(3, 3, n));
  CHECK_FALSE(g::payer_drops_into(4, 0, n));
  CHECK_FALSE(g::payer_drops_into(0, 4, n));
  // Receivers leaving i upward.
  CHECK(g::receiver_leaves(0, 1, n));
  CHECK_FALSE(g::receiver_leaves(0, 0, n));
  CHECK_FALSE(g::receiver_leaves(4, 2, n));
  // Payers leaving i downward.
  CHECK(g::payer_leaves(1, 0, n));
  CHECK_FALSE(g::payer_leaves(0, 0, n));
  CHECK_FALSE(g::payer_leaves(2, 4, n));
  // Receivers rising into i.
  CHECK(g::receiver_rises_into(1, 1));
  CHECK_FALSE(g::receiver_rises_into(0, 1));
  CHECK_FALSE(g::receiver_rises_into(2, 0));
}

TEST_CASE("guards: indirect variation terms") {
  const std::size_t n = 5;
  CHECK_FALSE(g::welfare_inflow(0));
  CHECK(g::welfare_inflow(4));
  CHECK(g::welfare_outflow(3, n));
  CHECK_FALSE(g::welfare_outflow(4, n));
  CHECK(g::tax_retreat_inflow(3, n));
  CHECK_FALSE(g::tax_retreat_inflow(4, n));
  CHECK_FALSE(g::tax_retreat_outflow(0));
  CHECK(g::tax_retreat_outflow(1));
  CHECK_FALSE(g::indirect_payer(0));
  CHECK(g::indirect_payer(1));
}

TEST_CASE("transition tensor: hand-evaluated entry") {
  const ModelParams params(ModelConfig{});
  const double tau2 = 0.30 + 0.15 / 14;  // 0.310714...
  const double expected = (37.5 / 1450.0) * 2.0 * (1 - tau2) / 50.0;
  // Class 2 gains class-3 payers who met class-2 receivers (0-based 1, 2, 1).
  CHECK(params.transitions()(1, 2, 1) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("transition tensor: stochastic and banded") {
  for (const auto& cfg : {ModelConfig{}, ModelConfig{15, 25, 1, 0.1, 0.6, 0.2}, ModelConfig{7, 10, 2, 0.0, 0.9, 0.05}}) {
    const ModelParams params(cfg);
    const auto& c = params.transitions();
    const std::size_t n = params.size();
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t k = 0; k < n; ++k) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          col += c(i, h, k);
          CHECK(c(i, h, k) >= 0.0);
          CHECK(c(i, h, k) <= 1.0);
          if (i + 1 < h || h + 1 < i) CHECK(c(i, h, k) == 0.0);
        }
        CHECK(std::abs(col - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("transition tensor: full taxation freezes direct moves") {
  const IncomeGrid grid = build_grid(6, 25.0);
  const TaxSchedule full{1.0, 1.0, std::vector<double>(6, 1.0)};
  const TransitionTensor c = direct_transition_tensor(grid, 1.0, build_encounter_matrix(grid), full);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t h = 0; h < 6; ++h) {
      for (std::size_t k = 0; k < 6; ++k) CHECK(c(i, h, k) == (i == h ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("model params: exchange amount bounded by class gaps") {
  ModelConfig cfg;
  cfg.exchange_amount = 25.0;
  test::expect_code(ErrorCode::invalid_argument, [&] { ModelParams{cfg}; });
  cfg.exchange_amount = 0.0;
  test::expect_code(ErrorCode::invalid_argument, [&] { ModelParams{cfg}; });
  cfg.exchange_amount = 24.0;
  CHECK_NOTHROW(ModelParams{cfg});
}

TEST_CASE("indirect variation: zero sum over classes") {
  std::mt19937_64 rng(11);
  for (const auto& cfg : {ModelConfig{}, ModelConfig{15, 25, 1, 0.2, 0.55, 0.28}}) {
    const ModelParams params(cfg);
    const std::size_t n = params.size();
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = test::random_simplex(n, rng);
      for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t k = 0; k < n; ++k) {
          double total = 0.0;
          for (std::size_t i = 0; i < n; ++i) total += indirect_variation(params, x, h, k, i);
          CHECK(std::abs(total) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("indirect variation: no tax, bottom payer and degenerate mass") {
  ModelConfig cfg;
  cfg.tau_min = cfg.tau_max = 0.0;
  const ModelParams untaxed(cfg);
  const ModelParams params(ModelConfig{});
  std::mt19937_64 rng(5);
  const auto x = test::random_simplex(15, rng);
  for (std::size_t h = 0; h < 15; ++h) {
    for (std::size_t i = 0; i < 15; ++i) {
      CHECK(indirect_variation(untaxed, x, h, 3, i) == 0.0);
      CHECK(indirect_variation(params, x, 0, h, i) == 0.0);
    }
  }
  const std::vector<double> empty(15, 0.0);
  test::expect_code(ErrorCode::degenerate_state, [&] { indirect_variation(params, empty, 4, 3, 4); });
}

TEST_CASE("rhs: conservation of population and mean income") {
  std::mt19937_64 rng(23);
  for (const auto& cfg : {ModelConfig{}, ModelConfig{15, 25, 1, 0.25, 0.5, 0.1}, ModelConfig{9, 40, 3, 0.1, 0.3, 0.45}}) {
    const ModelParams params(cfg);
    const std::size_t n = params.size();
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = test::random_simplex(n, rng);
      const auto d = rhs(params, x);
      double total = 0.0, income = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        total += d[i];
        income += params.grid().average(i) * d[i];
      }
      CHECK(std::abs(total) <= 1e-12);
      CHECK(std::abs(income) <= 1e-10);
    }
  }
}

TEST_CASE("rhs: bottom-class state is stationary") {
  const ModelParams params(ModelConfig{});
  std::vector<double> x(15, 0.0);
  x[0] = 1.0;
  for (double v : rhs(params, x)) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("rhs: factored form equals the dense double sum") {
  std::mt19937_64 rng(3);
  const ModelParams params(ModelConfig{15, 25, 1, 0.2, 0.55, 0.3});
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = test::random_simplex(15, rng);
    const auto fast = rhs(params, x);
    const auto dense = stationarity_residual(params, x);
    for (std::size_t i = 0; i < 15; ++i) CHECK(std::abs(fast[i] - dense[i]) <= 1e-14);
  }
}

TEST_CASE("rhs: rejects states of the wrong size") {
  const ModelParams params(ModelConfig{});
  std::vector<double> short_x(14, 1.0 / 14);
  test::expect_code(ErrorCode::invalid_argument, [&] { rhs(params, short_x); });
}

TEST_CASE("csv export of matrices") {
  const ModelParams params(ModelConfig{4, 25, 1, 0.3, 0.45, 0.5});
  std::ostringstream p_csv, c_csv;
  io::write_encounter_csv(p_csv, params.encounter());
  io::write_transition_csv(c_csv, params.transitions());
  std::istringstream p_in(p_csv.str());
  std::string line;
  std::getline(p_in, line);
  CHECK(line == "h,1,2,3,4");
  std::getline(p_in, line);
  CHECK(line == "1,0,0,0,0");
  int rows = 0;
  std::istringstream c_in(c_csv.str());
  std::getline(c_in, line);
  CHECK(line == "i,h,1,2,3,4");
  while (std::getline(c_in, line)) ++rows;
  CHECK(rows == 16);
}
