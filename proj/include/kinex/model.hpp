#pragma once

// Discrete kinetic exchange model with taxation and welfare redistribution.
//
// Income classes are indexed 0..n-1 throughout the library (class 0 is the
// poorest). Boundaries are indexed 0..n, so class c spans
// [boundary(c), boundary(c+1)). Output files label classes 1..n.

#include <cstddef>
#include <span>
#include <vector>

namespace kinex {

class IncomeGrid {
 public:
  // Arbitrary strictly increasing boundaries starting at 0.
  explicit IncomeGrid(std::vector<double> boundaries);

  std::size_t size() const noexcept { return average_.size(); }
  double boundary(std::size_t j) const { return boundaries_[j]; }
  double average(std::size_t c) const { return average_[c]; }
  std::span<const double> boundaries() const noexcept { return boundaries_; }
  std::span<const double> averages() const noexcept { return average_; }

  // Width of the two-class span a member of class c crosses when advancing
  // to c+1: r[c+2] - r[c]. Defined for c <= n-2.
  double advance_span(std::size_t c) const { return boundaries_[c + 2] - boundaries_[c]; }
  // Width crossed when retreating from c to c-1: r[c+1] - r[c-1]. Defined for c >= 1.
  double retreat_span(std::size_t c) const { return boundaries_[c + 1] - boundaries_[c - 1]; }

  // True when r_j = c*j (to relative 1e-12).
  bool is_linear() const noexcept;
  double mean_income(std::span<const double> x) const;

 private:
  std::vector<double> boundaries_;
  std::vector<double> average_;
};

IncomeGrid build_grid(int n, double spacing);

class EncounterMatrix {
 public:
  EncounterMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  // Probability that in an (h,k) encounter the h-individual pays.
  double operator()(std::size_t h, std::size_t k) const { return values_[h * n_ + k]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

EncounterMatrix build_encounter_matrix(const IncomeGrid& grid);

struct TaxSchedule {
  double tau_min = 0.0;
  double tau_max = 0.0;
  std::vector<double> rates;
};

TaxSchedule build_tax_schedule(int n, double tau_min, double tau_max);

struct WelfareWeights {
  double gamma = 0.5;
  std::vector<double> weights;
};

WelfareWeights build_welfare_weights(const IncomeGrid& grid, double gamma);

// C[i][h][k]: probability that an h-individual lands in class i after a
// direct exchange with a k-individual. Stored densely; only |i-h| <= 1 can
// be nonzero.
class TransitionTensor {
 public:
  explicit TransitionTensor(std::size_t n) : n_(n), values_(n * n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t h, std::size_t k) const {
    return values_[(i * n_ + h) * n_ + k];
  }
  double& at(std::size_t i, std::size_t h, std::size_t k) { return values_[(i * n_ + h) * n_ + k]; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

// Applicability conditions for the terms of the transition tensor and the
// indirect variations. All indices are 0-based; n is the class count.
namespace guard {

// Payer h = i+1 drops into i: needs i <= n-2 and a taxable receiver k <= n-2.
constexpr bool payer_drops_into(std::size_t i, std::size_t k, std::size_t n) {
  return i + 2 <= n && k + 2 <= n;
}
// Class i loses receivers advancing to i+1: i <= n-2 and payer k >= 1.
constexpr bool receiver_leaves(std::size_t i, std::size_t k, std::size_t n) {
  return i + 2 <= n && k >= 1;
}
// Class i loses payers retreating to i-1: i >= 1 and receiver k <= n-2.
constexpr bool payer_leaves(std::size_t i, std::size_t k, std::size_t n) {
  return i >= 1 && k + 2 <= n;
}
// Receiver h = i-1 advances into i: i >= 1 and payer k >= 1.
constexpr bool receiver_rises_into(std::size_t i, std::size_t k) { return i >= 1 && k >= 1; }

// Welfare advancement from i-1 into i.
constexpr bool welfare_inflow(std::size_t i) { return i >= 1; }
// Welfare advancement out of i into i+1 (the top class receives no welfare).
constexpr bool welfare_outflow(std::size_t i, std::size_t n) { return i + 2 <= n; }
// Tax-induced retreat of payer h = i+1 into i.
constexpr bool tax_retreat_inflow(std::size_t i, std::size_t n) { return i + 2 <= n; }
// Tax-induced retreat of payer h = i out of i.
constexpr bool tax_retreat_outflow(std::size_t i) { return i >= 1; }
// Indirect variations are defined for payers above the bottom class only.
constexpr bool indirect_payer(std::size_t h) { return h >= 1; }

}  // namespace guard

TransitionTensor direct_transition_tensor(const IncomeGrid& grid, double exchange_amount,
                                          const EncounterMatrix& p, const TaxSchedule& tax);

struct ModelConfig {
  int n = 15;
  double spacing = 25.0;
  double exchange_amount = 1.0;
  double tau_min = 0.30;
  double tau_max = 0.45;
  double gamma = 0.5;
};

// Immutable model instance. All derived quantities are built and validated
// at construction.
class ModelParams {
 public:
  explicit ModelParams(const ModelConfig& config);
  ModelParams(IncomeGrid grid, double exchange_amount, EncounterMatrix p, TaxSchedule tax,
              WelfareWeights welfare);

  std::size_t size() const noexcept { return grid_.size(); }
  const IncomeGrid& grid() const noexcept { return grid_; }
  double exchange_amount() const noexcept { return exchange_amount_; }
  const EncounterMatrix& encounter() const noexcept { return p_; }
  const TaxSchedule& tax() const noexcept { return tax_; }
  const WelfareWeights& welfare() const noexcept { return welfare_; }
  const TransitionTensor& transitions() const noexcept { return c_; }

 private:
  IncomeGrid grid_;
  double exchange_amount_;
  EncounterMatrix p_;
  TaxSchedule tax_;
  WelfareWeights welfare_;
  TransitionTensor c_;
};

// Throws invalid_argument unless x is nonnegative and sums to 1 within tol.
void validate_simplex(std::span<const double> x, double tol = 1e-9);

// T^i_[hk](x) = U + V: change of class i caused by the taxation of one (h,k)
// exchange and the redistribution of the collected tax. Zero for h = 0.
double indirect_variation(const ModelParams& params, std::span<const double> x, std::size_t h,
                          std::size_t k, std::size_t i);

// Right-hand side of the evolution equations. `out` must have size n.
void rhs(const ModelParams& params, std::span<const double> x, std::span<double> out);
std::vector<double> rhs(const ModelParams& params, std::span<const double> x);

// Residual of the stationarity conditions
//   sum_hk (C^i_hk + T^i_[hk](x)) x_h x_k - x_i,
// evaluated term by term from the dense tensor and indirect_variation. Slow,
// independent of the factored rhs.
std::vector<double> stationarity_residual(const ModelParams& params, std::span<const double> x);

}  // namespace kinex
