#include "kinex/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "kinex/error.hpp"
#include "kinex/indicators.hpp"
#include "parallel.hpp"

namespace kinex {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

ModelConfig with_rates(ModelConfig base, RatePair rates, double gamma) {
  base.tau_min = rates.tau_min;
  base.tau_max = rates.tau_max;
  base.gamma = gamma;
  return base;
}

struct Evaluation {
  double gini;
  double mobility;
};

Evaluation evaluate(const ModelConfig& config, double mu, const IntegrationSettings& settings) {
  const ModelParams params(config);
  const EquilibriumState eq = solve_equilibrium(params, mu, settings);
  return {gini(params.grid(), eq.x), mobility_collective(params, eq.x).mobility};
}

}  // namespace

CalibrationResult calibrate_mu(const ModelConfig& base, const CalibrationTarget& target, double mu_lo,
                               double mu_hi, const IntegrationSettings& settings,
                               const CalibrationOptions& options) {
  if (!(mu_lo < mu_hi)) fail(ErrorCode::invalid_argument, "calibration interval must satisfy mu_lo < mu_hi");
  const ModelConfig config = with_rates(base, {target.tau_min, target.tau_max}, target.gamma);
  const ModelParams params(config);
  auto gap = [&](double mu) {
    return gini(params.grid(), solve_equilibrium(params, mu, settings).x) - target.target_gini;
  };

  double lo = mu_lo;
  double hi = mu_hi;
  double f_lo = gap(lo);
  const double f_hi = gap(hi);
  if (f_lo == 0.0) return {lo, target.target_gini, 0};
  if (f_hi == 0.0) return {hi, target.target_gini, 0};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw CalibrationError("target Gini " + fmt(target.target_gini) + " not bracketed: G(" + fmt(lo) +
                               ") = " + fmt(f_lo + target.target_gini) + ", G(" + fmt(hi) +
                               ") = " + fmt(f_hi + target.target_gini),
                           f_lo + target.target_gini, f_hi + target.target_gini);
  }

  int iterations = 0;
  while (hi - lo > options.mu_tol && iterations < options.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = gap(mid);
    ++iterations;
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double mu = 0.5 * (lo + hi);
  const double g = gap(mu) + target.target_gini;
  if (std::abs(g - target.target_gini) > options.gini_tol) {
    throw CalibrationError("bisection ended at mu = " + fmt(mu) + " with G = " + fmt(g) +
                               " (target " + fmt(target.target_gini) + ")",
                           f_lo + target.target_gini, f_hi + target.target_gini);
  }
  return {mu, g, iterations};
}

SweepCell run_cell(const ModelConfig& base, RatePair rates, double gamma, double mu,
                   const IntegrationSettings& settings) {
  const ModelConfig config = with_rates(base, rates, gamma);
  const ModelParams params(config);

  SweepCell cell;
  cell.tau_min = rates.tau_min;
  cell.tau_max = rates.tau_max;
  cell.delta_tau = rates.spread();
  cell.gamma = gamma;
  cell.mu = mu;
  try {
    const EquilibriumState eq = solve_equilibrium(params, mu, settings);
    const IndicatorBundle b = evaluate_indicators(params, eq.x);
    cell.gini = b.gini;
    cell.mobility = b.mobility.mobility;
    cell.tax_revenue = b.tax_revenue;
    cell.residual = eq.residual;
    cell.x = eq.x;
    cell.converged = true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) throw;
    cell.converged = false;
    cell.failure = e.what();
    cell.gini = cell.mobility = cell.tax_revenue = std::numeric_limits<double>::quiet_NaN();
    if (const auto* nc = dynamic_cast<const NonConvergenceError*>(&e)) cell.residual = nc->residual();
  }
  return cell;
}

std::vector<SweepCell> sweep_grid(const ModelConfig& base, std::span<const double> delta_taus,
                                  std::span<const double> gammas, double mu, const IntegrationSettings& settings,
                                  unsigned threads, double rate_center) {
  if (delta_taus.empty() || gammas.empty()) {
    fail(ErrorCode::invalid_argument, "sweep needs at least one spread and one gamma");
  }
  // Validate every cell's parameters before spending time on any solve.
  for (double dt : delta_taus) {
    for (double g : gammas) static_cast<void>(ModelParams(with_rates(base, RatePair::centered(dt, rate_center), g)));
  }
  std::vector<SweepCell> cells(delta_taus.size() * gammas.size());
  detail::parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const double dt = delta_taus[idx / gammas.size()];
    const double g = gammas[idx % gammas.size()];
    cells[idx] = run_cell(base, RatePair::centered(dt, rate_center), g, mu, settings);
  });
  return cells;
}

LevelLine trace_level_line(const ModelConfig& base, double target_gini, std::span<const double> delta_taus,
                           double mu, const IntegrationSettings& settings, const LevelLineOptions& options) {
  if (delta_taus.empty()) fail(ErrorCode::invalid_argument, "level line needs at least one spread");
  if (!(options.gamma_lo < options.gamma_hi)) {
    fail(ErrorCode::invalid_argument, "gamma bounds must satisfy lo < hi");
  }
  if (!(options.tolerance > 0.0)) fail(ErrorCode::invalid_argument, "level-line tolerance must be positive");
  std::vector<double> spreads(delta_taus.begin(), delta_taus.end());
  std::sort(spreads.begin(), spreads.end());
  if (std::adjacent_find(spreads.begin(), spreads.end()) != spreads.end()) {
    fail(ErrorCode::invalid_argument, "level-line spreads must be distinct");
  }
  for (double dt : spreads) {
    static_cast<void>(ModelParams(with_rates(base, RatePair::centered(dt, options.rate_center), options.gamma_lo)));
    static_cast<void>(ModelParams(with_rates(base, RatePair::centered(dt, options.rate_center), options.gamma_hi)));
  }

  struct Slot {
    bool found = false;
    LevelPoint point;
    std::string warning;
  };
  std::vector<Slot> slots(spreads.size());

  detail::parallel_for(spreads.size(), options.threads, [&](std::size_t idx) {
    const RatePair rates = RatePair::centered(spreads[idx], options.rate_center);
    auto at = [&](double gamma) { return evaluate(with_rates(base, rates, gamma), mu, settings); };
    Slot& slot = slots[idx];
    try {
      double lo = options.gamma_lo;
      double hi = options.gamma_hi;
      Evaluation e_lo = at(lo);
      const Evaluation e_hi = at(hi);
      const double f_lo = e_lo.gini - target_gini;
      const double f_hi = e_hi.gini - target_gini;
      auto record = [&](double gamma, const Evaluation& e) {
        slot.found = true;
        slot.point = {rates.spread(), rates.tau_min, rates.tau_max, gamma, e.gini, e.mobility};
      };
      if (std::abs(f_lo) <= options.tolerance) return record(lo, e_lo);
      if (std::abs(f_hi) <= options.tolerance) return record(hi, e_hi);
      if ((f_lo > 0.0) == (f_hi > 0.0)) {
        slot.warning = "delta_tau " + fmt(rates.spread()) + ": target G " + fmt(target_gini) +
                       " not bracketed by G(gamma=" + fmt(lo) + ") = " + fmt(e_lo.gini) + " and G(gamma=" +
                       fmt(hi) + ") = " + fmt(e_hi.gini);
        return;
      }
      bool lo_positive = f_lo > 0.0;
      for (int it = 0; it < options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Evaluation e = at(mid);
        const double f = e.gini - target_gini;
        if (std::abs(f) <= options.tolerance) return record(mid, e);
        if ((f > 0.0) == lo_positive) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      slot.warning = "delta_tau " + fmt(rates.spread()) + ": bisection did not reach tolerance";
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_argument) throw;
      slot.warning = "delta_tau " + fmt(rates.spread()) + ": " + e.what();
    }
  });

  LevelLine line;
  line.target_gini = target_gini;
  line.tolerance = options.tolerance;
  for (auto& slot : slots) {
    if (slot.found) {
      line.points.push_back(slot.point);
    } else {
      line.warnings.push_back(std::move(slot.warning));
    }
  }
  return line;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) fail(ErrorCode::invalid_argument, "pearson needs paired samples");
  const double m = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= m;
  mb /= m;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

CorrelationReport correlation_report(std::span<const SweepCell> cells) {
  std::vector<const SweepCell*> ok;
  for (const auto& c : cells) {
    if (c.converged) ok.push_back(&c);
  }
  if (ok.size() < 3) fail(ErrorCode::invalid_argument, "correlation needs at least 3 converged cells");

  CorrelationReport report;
  report.cells = ok.size();
  std::vector<double> g, m;
  for (const auto* c : ok) {
    g.push_back(c->gini);
    m.push_back(c->mobility);
  }
  report.pearson = pearson(g, m);
  report.degenerate = std::isnan(report.pearson);

  auto sign_table = [&](auto fixed_of, auto moving_of, std::vector<SignCheck>& out) {
    std::map<double, std::vector<const SweepCell*>> groups;
    for (const auto* c : ok) groups[fixed_of(*c)].push_back(c);
    for (auto& [fixed, members] : groups) {
      std::sort(members.begin(), members.end(),
                [&](const SweepCell* a, const SweepCell* b) { return moving_of(*a) < moving_of(*b); });
      for (std::size_t j = 1; j < members.size(); ++j) {
        const SweepCell& a = *members[j - 1];
        const SweepCell& b = *members[j];
        const double product = (b.gini - a.gini) * (b.mobility - a.mobility);
        out.push_back({fixed, moving_of(a), moving_of(b), product});
        if (product > 0.0) report.increments_opposite = false;
      }
    }
  };
  sign_table([](const SweepCell& c) { return c.delta_tau; }, [](const SweepCell& c) { return c.gamma; },
             report.along_gamma);
  sign_table([](const SweepCell& c) { return c.gamma; }, [](const SweepCell& c) { return c.delta_tau; },
             report.along_delta_tau);
  return report;
}

}  // namespace kinex
