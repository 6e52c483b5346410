#pragma once

#include <span>
#include <string>
#include <vector>

namespace kinex {

// kappa-deformed exponential (sqrt(1 + k^2 u^2) + k u)^(1/k); exp(u) at k = 0.
double kappa_exp(double u, double kappa);

// Inverse of kappa_exp for y > 0: (y^k - y^-k) / (2k); log(y) at k = 0.
double kappa_log(double y, double kappa);

struct KappaParams {
  double alpha = 1.0;
  double kappa = 0.0;
  double beta = 1.0;  // scale; the Gini index does not depend on it

  void validate() const;
};

// Survival function exp_k(-(x/beta)^alpha) of the kappa-generalized distribution.
double kgen_survival(double x, const KappaParams& params);

// Inverse of the cumulative distribution, p in [0,1).
double kgen_quantile(double p, const KappaParams& params);

struct QuadratureSettings {
  double abs_tol = 1e-6;
  unsigned max_depth = 15;  // tanh-sinh refinement levels, 1..20
  // Table entries whose tail exponent alpha/kappa is within this margin of 1
  // are flagged instead of computed.
  double tail_margin = 0.05;
};

// Gini index from the Lorenz curve of the quantile function. Throws
// divergent_mean when kappa >= alpha (the mean is infinite) and accuracy when
// the quadrature error bound exceeds abs_tol.
double kgen_gini(const KappaParams& params, const QuadratureSettings& settings = {});
double kgen_gini(double alpha, double kappa, const QuadratureSettings& settings = {});

struct GasParams {
  double rest_energy_ratio = 1.0;  // m c^2 / (k_B T)
};

// kappa = 1 / sqrt(1 + m c^2 / (k_B T)).
double kappa_from_temperature(const GasParams& gas);

struct KappaTableRow {
  double alpha = 0.0;
  double kappa = 0.0;
  double gini = 0.0;  // NaN when flagged
  bool flagged = false;
  std::string note;
};

std::vector<KappaTableRow> gini_vs_kappa_table(std::span<const double> alphas, std::span<const double> kappas,
                                               const QuadratureSettings& settings = {}, unsigned threads = 1);

}  // namespace kinex
