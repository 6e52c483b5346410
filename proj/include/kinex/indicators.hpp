#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kinex/model.hpp"

namespace kinex {

struct LorenzPoint {
  double population;
  double income;
};

struct LorenzCurve {
  std::vector<LorenzPoint> points;  // starts at (0,0), ends at (1,1)
};

LorenzCurve lorenz(const IncomeGrid& grid, std::span<const double> x);

// One minus twice the trapezoidal area under the class-level Lorenz polyline.
double gini(const IncomeGrid& grid, std::span<const double> x);

// Tax collected (and redistributed) per unit time. Evaluated both as the
// full triple sum and in factored form; the two must agree.
double tax_revenue(const ModelParams& params, std::span<const double> x);

struct Advancement {
  double exchange = 0.0;
  double welfare = 0.0;
  double total() const { return exchange + welfare; }
};

// Probability that one member of class c (0-based, 1 <= c <= n-2) is
// promoted to c+1 in one step.
Advancement mobility_individual(const ModelParams& params, std::span<const double> x, std::size_t c);

// Population-weighted version, normalised by the interior population.
Advancement mobility_class(const ModelParams& params, std::span<const double> x, std::size_t c);

struct MobilityReport {
  // Entries cover interior classes only; entry j belongs to class first_class + j.
  std::size_t first_class = 1;
  std::vector<double> exchange_individual;
  std::vector<double> welfare_individual;
  std::vector<double> individual;
  std::vector<double> exchange_class;
  std::vector<double> welfare_class;
  std::vector<double> class_total;
  double exchange_collective = 0.0;
  double welfare_collective = 0.0;
  double mobility = 0.0;  // M
};

MobilityReport mobility_collective(const ModelParams& params, std::span<const double> x);

struct MobilityDelta {
  std::size_t first_class = 1;
  std::vector<double> individual;
  std::vector<double> class_total;
  std::vector<double> exchange_class;
  std::vector<double> welfare_class;
  double mobility = 0.0;  // M_b - M_a
  double gini = 0.0;      // G_b - G_a
};

// Differences (b - a) between two regimes on the same grid.
MobilityDelta mobility_delta(const ModelParams& params_a, std::span<const double> x_a,
                             const ModelParams& params_b, std::span<const double> x_b);

struct IndicatorBundle {
  double mu = 0.0;
  double gini = 0.0;
  double tax_revenue = 0.0;
  MobilityReport mobility;
};

IndicatorBundle evaluate_indicators(const ModelParams& params, std::span<const double> x);

}  // namespace kinex
