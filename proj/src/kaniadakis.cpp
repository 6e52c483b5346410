#include "kinex/kaniadakis.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "kinex/error.hpp"
#include "parallel.hpp"

namespace kinex {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) {
    fail(ErrorCode::invalid_argument, "kappa must lie in [0, 1), got " + fmt(kappa));
  }
}

// log(sinh(y)) for y > 0 without overflow.
double log_sinh(double y) {
  if (y > 20.0) return y - std::log(2.0) + std::log1p(-std::exp(-2.0 * y));
  return std::log(std::sinh(y));
}

}  // namespace

double kappa_exp(double u, double kappa) {
  check_kappa(kappa);
  if (kappa == 0.0) return std::exp(u);
  // sqrt(1 + k^2 u^2) + k u = exp(asinh(k u)); this form has no cancellation for u < 0.
  return std::exp(std::asinh(kappa * u) / kappa);
}

double kappa_log(double y, double kappa) {
  check_kappa(kappa);
  if (!(y > 0.0)) fail(ErrorCode::invalid_argument, "kappa_log needs a positive argument");
  if (kappa == 0.0) return std::log(y);
  return std::sinh(kappa * std::log(y)) / kappa;
}

void KappaParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorCode::invalid_argument, "alpha must be positive");
  check_kappa(kappa);
  if (!(beta > 0.0) || !std::isfinite(beta)) fail(ErrorCode::invalid_argument, "beta must be positive");
}

double kgen_survival(double x, const KappaParams& params) {
  params.validate();
  if (!(x >= 0.0)) fail(ErrorCode::invalid_argument, "survival function needs x >= 0");
  return kappa_exp(-std::pow(x / params.beta, params.alpha), params.kappa);
}

double kgen_quantile(double p, const KappaParams& params) {
  params.validate();
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorCode::invalid_argument, "quantile needs p in [0, 1)");
  const double tail_log = -std::log1p(-p);  // -log(1 - p)
  const double v = params.kappa == 0.0 ? tail_log : std::sinh(params.kappa * tail_log) / params.kappa;
  return params.beta * std::pow(v, 1.0 / params.alpha);
}

double kgen_gini(const KappaParams& params, const QuadratureSettings& settings) {
  params.validate();
  const double alpha = params.alpha;
  const double kappa = params.kappa;
  if (kappa >= alpha) {
    fail(ErrorCode::divergent_mean, "mean is infinite for kappa >= alpha (alpha = " + fmt(alpha) +
                                        ", kappa = " + fmt(kappa) + ")");
  }
  if (!(settings.abs_tol > 0.0)) fail(ErrorCode::invalid_argument, "quadrature tolerance must be positive");
  if (settings.max_depth < 1 || settings.max_depth > 20) {
    fail(ErrorCode::invalid_argument, "quadrature refinement depth must lie in 1..20");
  }

  // With q the population quantile and s = 1 - q,
  //   mean = int_0^1 x(q) dq,  int_0^1 L(p) dp = (1/mean) int_0^1 s x(q) dq.
  // The tail s -> 0 behaves like s^(-kappa/alpha); substituting s = u^m with
  // m = 1 / (1 - kappa/alpha) makes both integrands bounded at u = 0.
  const double m = 1.0 / (1.0 - kappa / alpha);
  const double log_m = std::log(m);
  const double log_beta = std::log(params.beta);
  auto log_weighted_quantile = [=](double u) {
    const double tail_log = -m * std::log(u);  // -log(s)
    const double log_v = kappa == 0.0 ? std::log(tail_log) : log_sinh(kappa * tail_log) - std::log(kappa);
    return log_beta + log_v / alpha + log_m + (m - 1.0) * std::log(u);
  };
  auto mean_integrand = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(log_weighted_quantile(u));
  };
  auto lorenz_integrand = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(m * std::log(u) + log_weighted_quantile(u));
  };

  // Both integrands have integrable endpoint singularities (a logarithm at
  // u = 0 when kappa = 0, q^(1/alpha) at u = 1), which tanh-sinh absorbs.
  boost::math::quadrature::tanh_sinh<double> quad(settings.max_depth);
  const double rel_tol = std::max(settings.abs_tol * 1e-4, 1e-14);
  double err_mean = 0.0;
  double err_lorenz = 0.0;
  const double mean = quad.integrate(mean_integrand, 0.0, 1.0, rel_tol, &err_mean);
  const double lorenz = quad.integrate(lorenz_integrand, 0.0, 1.0, rel_tol, &err_lorenz);
  err_mean *= std::abs(mean);
  err_lorenz *= std::abs(lorenz);
  if (!(mean > 0.0) || !std::isfinite(mean) || !std::isfinite(lorenz)) {
    fail(ErrorCode::accuracy, "quadrature produced a non-finite mean");
  }

  const double g = 1.0 - 2.0 * lorenz / mean;
  // Error propagated through 1 - 2 a / b.
  const double bound = 2.0 * (err_lorenz / mean + lorenz * err_mean / (mean * mean));
  if (bound > settings.abs_tol) {
    fail(ErrorCode::accuracy, "quadrature error bound " + fmt(bound) + " exceeds tolerance " +
                                  fmt(settings.abs_tol) + " (alpha = " + fmt(alpha) + ", kappa = " + fmt(kappa) + ")");
  }
  return g;
}

double kgen_gini(double alpha, double kappa, const QuadratureSettings& settings) {
  return kgen_gini(KappaParams{alpha, kappa, 1.0}, settings);
}

double kappa_from_temperature(const GasParams& gas) {
  const double r = gas.rest_energy_ratio;
  if (!(r > 0.0) || !std::isfinite(r)) {
    fail(ErrorCode::invalid_argument, "rest-energy ratio m c^2 / (k_B T) must be positive and finite");
  }
  return 1.0 / std::sqrt(1.0 + r);
}

std::vector<KappaTableRow> gini_vs_kappa_table(std::span<const double> alphas, std::span<const double> kappas,
                                               const QuadratureSettings& settings, unsigned threads) {
  if (alphas.empty() || kappas.empty()) {
    fail(ErrorCode::invalid_argument, "table needs at least one alpha and one kappa");
  }
  std::vector<KappaTableRow> rows;
  rows.reserve(alphas.size() * kappas.size());
  for (double a : alphas) {
    for (double k : kappas) rows.push_back({a, k, std::numeric_limits<double>::quiet_NaN(), false, {}});
  }
  detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
    KappaTableRow& row = rows[i];
    if (!(row.alpha > 0.0) || !(row.kappa >= 0.0 && row.kappa < 1.0)) {
      row.flagged = true;
      row.note = "outside domain";
      return;
    }
    if (row.kappa * (1.0 + settings.tail_margin) >= row.alpha) {
      row.flagged = true;
      row.note = row.kappa >= row.alpha ? "infinite mean" : "tail exponent too close to 1";
      return;
    }
    try {
      row.gini = kgen_gini(row.alpha, row.kappa, settings);
    } catch (const Error& e) {
      row.flagged = true;
      row.note = e.what();
    }
  });
  return rows;
}

}  // namespace kinex
