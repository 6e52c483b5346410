#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kinex/model.hpp"

namespace kinex {

struct IntegrationSettings {
  double dt = 0.5;
  double max_time = 5e6;
  double convergence_tol = 1e-12;  // on the sup-norm of the rhs
  double drift_tol = 1e-9;         // on |sum x - 1| per step and on mu drift
  bool renormalize = true;

  void validate() const;
};

enum class InitialKind { uniform, low_middle_weighted, two_point, explicit_values };

struct InitialConditionSpec {
  InitialKind kind = InitialKind::low_middle_weighted;
  // two_point: the two classes (0-based, lower first) sharing the mass.
  std::size_t class_a = 0;
  std::size_t class_b = 0;
  // low_middle_weighted: ratio of successive class masses when no target_mu is set.
  double decay = 0.7;
  std::vector<double> values;  // explicit_values
  std::optional<double> target_mu;
};

struct EquilibriumState {
  std::vector<double> x;
  double mu = 0.0;
  double residual = 0.0;          // sup-norm of the rhs at x
  double step_difference = 0.0;   // sup-norm of the last step's change in x
  double elapsed_time = 0.0;
  double rate_estimate = 0.0;     // decay rate of the residual, 1/time
  double rate_fit_r2 = 0.0;       // quality of the log-linear fit behind rate_estimate
  std::size_t steps = 0;
  double max_sum_drift = 0.0;     // max |sum x - 1| observed before renormalization
  double max_mu_drift = 0.0;      // max |mu(t) - mu(0)|
};

struct TrajectorySample {
  double time;
  std::span<const double> x;
  double mu;
  double residual;
};

using TrajectoryObserver = std::function<void(const TrajectorySample&)>;

std::vector<double> make_initial_condition(const InitialConditionSpec& spec, const IncomeGrid& grid);

// Fixed-step classical Runge-Kutta integration until the rhs sup-norm falls
// below settings.convergence_tol. The observer, if set, sees every
// `stride`-th step plus the initial and final states.
EquilibriumState integrate(const ModelParams& params, std::vector<double> x0,
                           const IntegrationSettings& settings, const TrajectoryObserver& observer = {},
                           std::size_t stride = 1);

// Equilibrium at mean income mu, started from the low/middle weighted
// initial condition and cross-checked against the stationarity conditions.
EquilibriumState solve_equilibrium(const ModelParams& params, double mu, const IntegrationSettings& settings);

}  // namespace kinex
