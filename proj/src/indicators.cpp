#include "kinex/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinex/error.hpp"

namespace kinex {

namespace {

void check_state(std::size_t n, std::span<const double> x) {
  if (x.size() != n) {
    fail(ErrorCode::invalid_argument,
         "state has " + std::to_string(x.size()) + " components, expected " + std::to_string(n));
  }
}

struct TaxFlows {
  double collected = 0.0;  // sum_hk p_hk tau_k x_h x_k
  double welfare_all = 0.0;
  double welfare_eligible = 0.0;
};

TaxFlows tax_flows(const ModelParams& params, std::span<const double> x) {
  const std::size_t n = params.size();
  const auto& p = params.encounter();
  const auto& tau = params.tax().rates;
  const auto& w = params.welfare().weights;
  TaxFlows f;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) f.collected += p(h, k) * tau[k] * x[h] * x[k];
  }
  for (std::size_t j = 0; j + 1 < n; ++j) f.welfare_eligible += w[j] * x[j];
  f.welfare_all = f.welfare_eligible + w[n - 1] * x[n - 1];
  if (!(f.welfare_all > 0.0)) fail(ErrorCode::degenerate_state, "welfare-weighted population mass is zero");
  return f;
}

void check_interior(const ModelParams& params, std::size_t c) {
  if (c < 1 || c + 2 > params.size()) {
    fail(ErrorCode::invalid_argument, "mobility is defined for interior classes 2..n-1 only (got class " +
                                          std::to_string(c + 1) + ")");
  }
}

double interior_population(std::span<const double> x) {
  const double interior = 1.0 - x.front() - x.back();
  if (!(interior > 0.0)) {
    fail(ErrorCode::degenerate_state, "no population in the interior classes");
  }
  return interior;
}

Advancement individual_with(const ModelParams& params, std::span<const double> x, std::size_t c,
                            const TaxFlows& flows) {
  const std::size_t n = params.size();
  const auto& grid = params.grid();
  const auto& p = params.encounter();
  const double factor = params.exchange_amount() / (grid.boundary(c + 2) - grid.boundary(c + 1));
  double paid_in = 0.0;
  for (std::size_t k = 0; k < n; ++k) paid_in += p(k, c) * x[k];
  Advancement a;
  a.exchange = factor * paid_in * (1.0 - params.tax().rates[c]);
  a.welfare = factor * params.welfare().weights[c] / flows.welfare_all * flows.collected;
  return a;
}

}  // namespace

LorenzCurve lorenz(const IncomeGrid& grid, std::span<const double> x) {
  const std::size_t n = grid.size();
  check_state(n, x);
  double population = 0.0;
  double income = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    population += x[c];
    income += grid.average(c) * x[c];
  }
  if (!(income > 0.0) || !(population > 0.0)) {
    fail(ErrorCode::degenerate_state, "Lorenz curve needs positive population and income");
  }
  LorenzCurve curve;
  curve.points.reserve(n + 1);
  curve.points.push_back({0.0, 0.0});
  double cp = 0.0;
  double ci = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    cp += x[c];
    ci += grid.average(c) * x[c];
    curve.points.push_back({cp / population, ci / income});
  }
  return curve;
}

double gini(const IncomeGrid& grid, std::span<const double> x) {
  const LorenzCurve curve = lorenz(grid, x);
  double twice_area = 0.0;
  for (std::size_t j = 1; j < curve.points.size(); ++j) {
    const auto& a = curve.points[j - 1];
    const auto& b = curve.points[j];
    twice_area += (b.population - a.population) * (a.income + b.income);
  }
  return std::max(0.0, 1.0 - twice_area);
}

double tax_revenue(const ModelParams& params, std::span<const double> x) {
  const std::size_t n = params.size();
  check_state(n, x);
  const auto& p = params.encounter();
  const auto& tau = params.tax().rates;
  const auto& w = params.welfare().weights;
  const double s = params.exchange_amount();
  const TaxFlows flows = tax_flows(params, x);

  double triple = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j + 1 < n; ++j) {
        triple += p(h, k) * s * tau[k] * (w[j] * x[j] / flows.welfare_all) * x[h] * x[k];
      }
    }
  }
  const double factored = s * flows.collected * flows.welfare_eligible / flows.welfare_all;
  if (std::abs(triple - factored) > 1e-14 + 1e-12 * std::abs(factored)) {
    std::ostringstream os;
    os.precision(17);
    os << "tax revenue forms disagree: " << triple << " vs " << factored;
    fail(ErrorCode::internal_consistency, os.str());
  }
  return triple;
}

Advancement mobility_individual(const ModelParams& params, std::span<const double> x, std::size_t c) {
  check_state(params.size(), x);
  check_interior(params, c);
  return individual_with(params, x, c, tax_flows(params, x));
}

Advancement mobility_class(const ModelParams& params, std::span<const double> x, std::size_t c) {
  check_state(params.size(), x);
  check_interior(params, c);
  const double interior = interior_population(x);
  Advancement a = individual_with(params, x, c, tax_flows(params, x));
  a.exchange *= x[c] / interior;
  a.welfare *= x[c] / interior;
  return a;
}

MobilityReport mobility_collective(const ModelParams& params, std::span<const double> x) {
  const std::size_t n = params.size();
  check_state(n, x);
  const double interior = interior_population(x);
  const TaxFlows flows = tax_flows(params, x);

  MobilityReport r;
  r.first_class = 1;
  for (std::size_t c = 1; c + 1 < n; ++c) {
    const Advancement ind = individual_with(params, x, c, flows);
    const double weight = x[c] / interior;
    r.exchange_individual.push_back(ind.exchange);
    r.welfare_individual.push_back(ind.welfare);
    r.individual.push_back(ind.total());
    r.exchange_class.push_back(ind.exchange * weight);
    r.welfare_class.push_back(ind.welfare * weight);
    r.class_total.push_back(ind.exchange * weight + ind.welfare * weight);
    r.exchange_collective += ind.exchange * weight;
    r.welfare_collective += ind.welfare * weight;
  }
  r.mobility = r.exchange_collective + r.welfare_collective;
  return r;
}

MobilityDelta mobility_delta(const ModelParams& params_a, std::span<const double> x_a,
                             const ModelParams& params_b, std::span<const double> x_b) {
  if (params_a.size() != params_b.size()) {
    fail(ErrorCode::invalid_argument, "regimes have different class counts");
  }
  const auto ra = params_a.grid().boundaries();
  const auto rb = params_b.grid().boundaries();
  if (!std::equal(ra.begin(), ra.end(), rb.begin())) {
    fail(ErrorCode::invalid_argument, "regimes use different income grids");
  }
  const MobilityReport a = mobility_collective(params_a, x_a);
  const MobilityReport b = mobility_collective(params_b, x_b);

  MobilityDelta d;
  d.first_class = a.first_class;
  for (std::size_t j = 0; j < a.individual.size(); ++j) {
    d.individual.push_back(b.individual[j] - a.individual[j]);
    d.class_total.push_back(b.class_total[j] - a.class_total[j]);
    d.exchange_class.push_back(b.exchange_class[j] - a.exchange_class[j]);
    d.welfare_class.push_back(b.welfare_class[j] - a.welfare_class[j]);
  }
  d.mobility = b.mobility - a.mobility;
  d.gini = gini(params_b.grid(), x_b) - gini(params_a.grid(), x_a);
  return d;
}

IndicatorBundle evaluate_indicators(const ModelParams& params, std::span<const double> x) {
  IndicatorBundle b;
  b.mu = params.grid().mean_income(x);
  b.gini = gini(params.grid(), x);
  b.tax_revenue = tax_revenue(params, x);
  b.mobility = mobility_collective(params, x);
  return b;
}

}  // namespace kinex
