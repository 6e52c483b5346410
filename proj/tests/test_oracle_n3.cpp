#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "kinex/indicators.hpp"
#include "kinex/model.hpp"
#include "oracles/n3_oracle.hpp"
#include "support.hpp"

using namespace kinex;

namespace {

constexpr double kTol = 1e-14;

oracle::N3 make_oracle() {
  oracle::N3 o;
  o.r = {0, 8, 20, 36};
  o.S = 1.0;
  o.tau = {0, 0.2, 0.3, 0.4};
  o.w = {0, 3, 2, 1.5};
  return o;
}

ModelParams make_model() {
  IncomeGrid grid({0, 8, 20, 36});
  EncounterMatrix p = build_encounter_matrix(grid);
  return ModelParams(grid, 1.0, p, TaxSchedule{0.2, 0.4, {0.2, 0.3, 0.4}}, WelfareWeights{0.3, {3, 2, 1.5}});
}

std::vector<std::array<double, 4>> states() {
  std::vector<std::array<double, 4>> out = {{0, 0.2, 0.5, 0.3}, {0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 0.6, 0.1, 0.3}};
  std::mt19937_64 rng(97);
  for (int t = 0; t < 5; ++t) {
    const auto x = test::random_simplex(3, rng);
    out.push_back({0, x[0], x[1], x[2]});
  }
  return out;
}

std::vector<double> lib_state(const std::array<double, 4>& X) { return {X[1], X[2], X[3]}; }

bool close(double a, double b) { return std::abs(a - b) <= kTol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("n=3 encounter matrix on a non-uniform grid") {
  const auto o = make_oracle();
  const auto params = make_model();
  for (int h = 1; h <= 3; ++h) {
    for (int k = 1; k <= 3; ++k) CHECK(close(params.encounter()(h - 1, k - 1), o.p(h, k)));
  }
}

TEST_CASE("n=3 rhs matches the written-out equations") {
  const auto o = make_oracle();
  const auto params = make_model();
  for (const auto& X : states()) {
    const auto expected = o.rhs(X);
    const auto got = rhs(params, lib_state(X));
    for (int i = 1; i <= 3; ++i) {
      INFO("class ", i, " got ", got[i - 1], " expected ", expected[i]);
      CHECK(std::abs(got[i - 1] - expected[i]) <= kTol);
    }
    const auto dense = stationarity_residual(params, lib_state(X));
    for (int i = 1; i <= 3; ++i) CHECK(std::abs(dense[i - 1] - expected[i]) <= kTol);
  }
}

TEST_CASE("n=3 selected indirect variations") {
  const auto o = make_oracle();
  const auto params = make_model();
  for (const auto& X : states()) {
    const auto x = lib_state(X);
    CHECK(std::abs(indirect_variation(params, x, 2, 1, 1) - o.indirect_3_2_at_2(X)) <= kTol);
    CHECK(std::abs(indirect_variation(params, x, 1, 1, 0) - o.indirect_2_2_at_1(X)) <= kTol);
    CHECK(std::abs(indirect_variation(params, x, 1, 0, 2) - o.indirect_2_1_at_3(X)) <= kTol);
  }
}

TEST_CASE("n=3 tax revenue and mobility") {
  const auto o = make_oracle();
  const auto params = make_model();
  for (const auto& X : states()) {
    const auto x = lib_state(X);
    CHECK(std::abs(tax_revenue(params, x) - o.tax_revenue(X)) <= kTol);
    const auto ind = mobility_individual(params, x, 1);
    CHECK(std::abs(ind.exchange - o.exchange_individual(X)) <= kTol);
    CHECK(std::abs(ind.welfare - o.welfare_individual(X)) <= kTol);
    const auto cls = mobility_class(params, x, 1);
    CHECK(std::abs(cls.exchange - o.exchange_class(X)) <= kTol);
    CHECK(std::abs(cls.welfare - o.welfare_class(X)) <= kTol);
    const auto report = mobility_collective(params, x);
    CHECK(std::abs(report.mobility - (o.exchange_class(X) + o.welfare_class(X))) <= kTol);
  }
}
