#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kinex/dynamics.hpp"
#include "kinex/model.hpp"

namespace kinex {

// Tax rates around a fixed midpoint: (center - spread/2, center + spread/2).
// With the default center 0.375 a spread of 0.15 is 30-45%, 0.25 is 25-50%.
inline constexpr double kDefaultRateCenter = 0.375;

struct RatePair {
  double tau_min = 0.0;
  double tau_max = 0.0;

  double spread() const { return tau_max - tau_min; }
  static RatePair centered(double spread, double center = kDefaultRateCenter) {
    return {center - 0.5 * spread, center + 0.5 * spread};
  }
};

struct SweepCell {
  double tau_min = 0.0;
  double tau_max = 0.0;
  double delta_tau = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  double gini = 0.0;
  double mobility = 0.0;
  double tax_revenue = 0.0;
  std::vector<double> x;
  double residual = 0.0;
  bool converged = false;
  std::string failure;  // solver message when !converged
};

struct CalibrationTarget {
  double tau_min = 0.30;
  double tau_max = 0.45;
  double gamma = 0.5;
  double target_gini = 0.368;
};

struct CalibrationOptions {
  double gini_tol = 1e-4;  // required |G(mu*) - target|
  double mu_tol = 1e-7;    // bisection stops once the bracket is this narrow
  int max_iterations = 200;
};

struct CalibrationResult {
  double mu = 0.0;
  double gini = 0.0;
  int iterations = 0;
};

// Bisection on mu -> G(equilibrium(mu)) over [mu_lo, mu_hi].
CalibrationResult calibrate_mu(const ModelConfig& base, const CalibrationTarget& target, double mu_lo,
                               double mu_hi, const IntegrationSettings& settings,
                               const CalibrationOptions& options = {});

// Solver failures mark the cell as not converged; invalid parameters throw.
SweepCell run_cell(const ModelConfig& base, RatePair rates, double gamma, double mu,
                   const IntegrationSettings& settings);

// Cells in row-major order: delta_tau outer, gamma inner. threads == 0 picks
// the hardware concurrency.
std::vector<SweepCell> sweep_grid(const ModelConfig& base, std::span<const double> delta_taus,
                                  std::span<const double> gammas, double mu, const IntegrationSettings& settings,
                                  unsigned threads = 1, double rate_center = kDefaultRateCenter);

struct LevelPoint {
  double delta_tau = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  double gamma = 0.0;
  double gini = 0.0;
  double mobility = 0.0;
};

struct LevelLine {
  double target_gini = 0.0;
  double tolerance = 0.0;
  std::vector<LevelPoint> points;     // increasing delta_tau
  std::vector<std::string> warnings;  // skipped spreads
};

struct LevelLineOptions {
  double gamma_lo = 0.05;
  double gamma_hi = 0.5;
  double tolerance = 5e-4;
  int max_iterations = 60;
  double rate_center = kDefaultRateCenter;
  unsigned threads = 1;
};

// For each spread, bisection on gamma until |G - target| <= tolerance.
LevelLine trace_level_line(const ModelConfig& base, double target_gini, std::span<const double> delta_taus,
                           double mu, const IntegrationSettings& settings, const LevelLineOptions& options = {});

struct SignCheck {
  double fixed = 0.0;  // the coordinate held constant
  double from = 0.0;
  double to = 0.0;
  double product = 0.0;  // (G_to - G_from) * (M_to - M_from)
};

struct CorrelationReport {
  std::size_t cells = 0;
  double pearson = 0.0;
  bool degenerate = false;          // G or M constant; pearson is NaN
  std::vector<SignCheck> along_gamma;      // rows: fixed delta_tau
  std::vector<SignCheck> along_delta_tau;  // columns: fixed gamma
  bool increments_opposite = true;  // every product <= 0
};

CorrelationReport correlation_report(std::span<const SweepCell> cells);

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace kinex
