#include "kinex/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinex/error.hpp"

namespace kinex {

namespace {

constexpr double kStochasticTol = 1e-12;

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

IncomeGrid::IncomeGrid(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 4) {
    fail(ErrorCode::invalid_argument, "income grid needs at least 3 classes");
  }
  if (boundaries_.front() != 0.0) {
    fail(ErrorCode::invalid_argument, "income grid must start at 0");
  }
  for (std::size_t j = 1; j < boundaries_.size(); ++j) {
    if (!std::isfinite(boundaries_[j]) || !(boundaries_[j] > boundaries_[j - 1])) {
      fail(ErrorCode::invalid_argument, "income grid boundaries must be finite and strictly increasing");
    }
  }
  average_.resize(boundaries_.size() - 1);
  for (std::size_t c = 0; c < average_.size(); ++c) {
    average_[c] = 0.5 * (boundaries_[c] + boundaries_[c + 1]);
  }
}

bool IncomeGrid::is_linear() const noexcept {
  const double step = boundaries_[1];
  for (std::size_t j = 1; j < boundaries_.size(); ++j) {
    const double expected = step * static_cast<double>(j);
    if (std::abs(boundaries_[j] - expected) > 1e-12 * expected) return false;
  }
  return true;
}

double IncomeGrid::mean_income(std::span<const double> x) const {
  double mu = 0.0;
  for (std::size_t c = 0; c < average_.size(); ++c) mu += average_[c] * x[c];
  return mu;
}

IncomeGrid build_grid(int n, double spacing) {
  if (n < 3) fail(ErrorCode::invalid_argument, "class count must be at least 3, got " + std::to_string(n));
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    fail(ErrorCode::invalid_argument, "grid spacing must be positive, got " + describe(spacing));
  }
  std::vector<double> r(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) r[static_cast<std::size_t>(j)] = spacing * j;
  return IncomeGrid(std::move(r));
}

EncounterMatrix::EncounterMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != n_ * n_) fail(ErrorCode::invalid_argument, "encounter matrix must be n x n");
  for (std::size_t h = 0; h < n_; ++h) {
    for (std::size_t k = 0; k < n_; ++k) {
      const double phk = (*this)(h, k);
      if (!(phk >= 0.0 && phk <= 1.0)) {
        fail(ErrorCode::invalid_argument, "encounter probabilities must lie in [0,1]");
      }
      if (phk + (*this)(k, h) > 1.0) {
        fail(ErrorCode::invalid_argument, "encounter probabilities must satisfy p[h][k] + p[k][h] <= 1");
      }
    }
  }
}

EncounterMatrix build_encounter_matrix(const IncomeGrid& grid) {
  const std::size_t n = grid.size();
  const double top = grid.average(n - 1);
  std::vector<double> p(n * n);
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      double v;
      if (h == 0 || k == n - 1) {
        v = 0.0;  // bottom class never pays, top class is never paid
      } else if (h == n - 1) {
        v = grid.average(k) / (2.0 * top);
      } else if (k == 0) {
        v = grid.average(0) / (2.0 * top);
      } else if (h == k) {
        v = grid.average(h) / (2.0 * top);
      } else {
        v = std::min(grid.average(h), grid.average(k)) / (4.0 * top);
      }
      p[h * n + k] = v;
    }
  }
  return EncounterMatrix(n, std::move(p));
}

TaxSchedule build_tax_schedule(int n, double tau_min, double tau_max) {
  if (n < 2) fail(ErrorCode::invalid_argument, "tax schedule needs at least 2 classes");
  if (!(tau_min >= 0.0 && tau_min <= tau_max && tau_max < 1.0)) {
    fail(ErrorCode::invalid_argument, "tax rates must satisfy 0 <= tau_min <= tau_max < 1, got (" +
                                          describe(tau_min) + ", " + describe(tau_max) + ")");
  }
  TaxSchedule tax{tau_min, tau_max, std::vector<double>(static_cast<std::size_t>(n))};
  for (int j = 0; j < n; ++j) {
    tax.rates[static_cast<std::size_t>(j)] =
        tau_min + static_cast<double>(j) / static_cast<double>(n - 1) * (tau_max - tau_min);
  }
  tax.rates.back() = tau_max;
  return tax;
}

WelfareWeights build_welfare_weights(const IncomeGrid& grid, double gamma) {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    fail(ErrorCode::invalid_argument, "gamma must lie in (0, 1/2], got " + describe(gamma));
  }
  if (!grid.is_linear()) {
    fail(ErrorCode::invalid_argument, "welfare weights require a linear income grid r_j = c*j");
  }
  const std::size_t n = grid.size();
  const double nd = static_cast<double>(n);
  const double range = grid.average(n - 1) - grid.average(0);
  WelfareWeights out{gamma, std::vector<double>(n)};
  for (std::size_t c = 0; c < n; ++c) {
    const double j = static_cast<double>(c + 1);
    out.weights[c] = grid.average(n - 1 - c) + 2.0 / (nd - 1.0) * gamma * (j - (nd + 1.0) / 2.0) * range;
  }
  return out;
}

TransitionTensor direct_transition_tensor(const IncomeGrid& grid, double exchange_amount,
                                          const EncounterMatrix& p, const TaxSchedule& tax) {
  const std::size_t n = grid.size();
  if (p.size() != n || tax.rates.size() != n) {
    fail(ErrorCode::invalid_argument, "grid, encounter matrix and tax schedule sizes differ");
  }
  const double two_s = 2.0 * exchange_amount;
  const auto& tau = tax.rates;
  TransitionTensor c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (guard::payer_drops_into(i, k, n)) {
        c.at(i, i + 1, k) = p(i + 1, k) * two_s * (1.0 - tau[k]) / grid.advance_span(i);
      }
      double stay = 1.0;
      if (guard::receiver_leaves(i, k, n)) {
        stay -= p(k, i) * two_s * (1.0 - tau[i]) / grid.advance_span(i);
      }
      if (guard::payer_leaves(i, k, n)) {
        stay -= p(i, k) * two_s * (1.0 - tau[k]) / grid.retreat_span(i);
      }
      c.at(i, i, k) = stay;
      if (guard::receiver_rises_into(i, k)) {
        c.at(i, i - 1, k) = p(k, i - 1) * two_s * (1.0 - tau[i - 1]) / grid.retreat_span(i);
      }
    }
  }

  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t k = 0; k < n; ++k) {
      double total = 0.0;
      for (std::size_t i = (h == 0 ? 0 : h - 1); i <= std::min(h + 1, n - 1); ++i) {
        const double v = c(i, h, k);
        if (v < 0.0 || v > 1.0) {
          fail(ErrorCode::internal_consistency,
               "transition probability outside [0,1]; exchange amount too large for the grid");
        }
        total += v;
      }
      if (std::abs(total - 1.0) > kStochasticTol) {
        fail(ErrorCode::internal_consistency,
             "transition tensor is not column-stochastic (deviation " + describe(total - 1.0) + ")");
      }
    }
  }
  return c;
}

namespace {

void check_exchange_amount(const IncomeGrid& grid, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    fail(ErrorCode::invalid_argument, "exchange amount must be positive, got " + describe(s));
  }
  double min_gap = grid.average(1) - grid.average(0);
  for (std::size_t c = 1; c + 1 < grid.size(); ++c) {
    min_gap = std::min(min_gap, grid.average(c + 1) - grid.average(c));
  }
  if (!(s < min_gap)) {
    fail(ErrorCode::invalid_argument, "exchange amount " + describe(s) +
                                          " must be smaller than the minimum class-average gap " +
                                          describe(min_gap));
  }
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config)
    : ModelParams(build_grid(config.n, config.spacing), config.exchange_amount,
                  build_encounter_matrix(build_grid(config.n, config.spacing)),
                  build_tax_schedule(config.n, config.tau_min, config.tau_max),
                  build_welfare_weights(build_grid(config.n, config.spacing), config.gamma)) {}

ModelParams::ModelParams(IncomeGrid grid, double exchange_amount, EncounterMatrix p, TaxSchedule tax,
                         WelfareWeights welfare)
    : grid_(std::move(grid)),
      exchange_amount_(exchange_amount),
      p_(std::move(p)),
      tax_(std::move(tax)),
      welfare_(std::move(welfare)),
      c_(0) {
  const std::size_t n = grid_.size();
  if (welfare_.weights.size() != n) fail(ErrorCode::invalid_argument, "welfare weight count differs from n");
  for (double w : welfare_.weights) {
    if (!(w > 0.0)) fail(ErrorCode::invalid_argument, "welfare weights must be positive");
  }
  check_exchange_amount(grid_, exchange_amount_);
  c_ = direct_transition_tensor(grid_, exchange_amount_, p_, tax_);
}

void validate_simplex(std::span<const double> x, double tol) {
  double total = 0.0;
  for (double v : x) {
    if (!std::isfinite(v) || v < -tol) {
      fail(ErrorCode::invalid_argument, "state has a negative or non-finite component");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > tol) {
    fail(ErrorCode::invalid_argument, "state components must sum to 1 (sum is " + describe(total) + ")");
  }
}

namespace {

struct WelfareMass {
  double all = 0.0;        // sum_j w_j x_j
  double eligible = 0.0;   // same, top class excluded
};

WelfareMass welfare_mass(const ModelParams& params, std::span<const double> x) {
  const auto& w = params.welfare().weights;
  const std::size_t n = params.size();
  WelfareMass m;
  for (std::size_t j = 0; j + 1 < n; ++j) m.eligible += w[j] * x[j];
  m.all = m.eligible + w[n - 1] * x[n - 1];
  if (!(m.all > 0.0)) fail(ErrorCode::degenerate_state, "welfare-weighted population mass is zero");
  return m;
}

void check_size(const ModelParams& params, std::size_t got) {
  if (got != params.size()) {
    fail(ErrorCode::invalid_argument,
         "state has " + std::to_string(got) + " components, model has " + std::to_string(params.size()));
  }
}

}  // namespace

double indirect_variation(const ModelParams& params, std::span<const double> x, std::size_t h,
                          std::size_t k, std::size_t i) {
  check_size(params, x.size());
  const std::size_t n = params.size();
  if (h >= n || k >= n || i >= n) fail(ErrorCode::invalid_argument, "class index out of range");
  if (!guard::indirect_payer(h)) return 0.0;

  const auto& grid = params.grid();
  const auto& w = params.welfare().weights;
  const WelfareMass mass = welfare_mass(params, x);
  const double base = params.encounter()(h, k) * 2.0 * params.exchange_amount() * params.tax().rates[k];

  double advance = 0.0;
  if (guard::welfare_inflow(i)) advance += w[i - 1] * x[i - 1] / grid.advance_span(i - 1);
  if (guard::welfare_outflow(i, n)) advance -= w[i] * x[i] / grid.advance_span(i);

  double retreat = 0.0;
  if (guard::tax_retreat_inflow(i, n) && h == i + 1) retreat += 1.0 / grid.retreat_span(h);
  if (guard::tax_retreat_outflow(i) && h == i) retreat -= 1.0 / grid.retreat_span(h);

  return base / mass.all * advance + base * mass.eligible / mass.all * retreat;
}

void rhs(const ModelParams& params, std::span<const double> x, std::span<double> out) {
  check_size(params, x.size());
  check_size(params, out.size());
  const std::size_t n = params.size();
  const auto& grid = params.grid();
  const auto& p = params.encounter();
  const auto& tau = params.tax().rates;
  const auto& w = params.welfare().weights;
  const auto& c = params.transitions();

  double total = 0.0;
  for (double v : x) total += v;

  // b[h] = sum_k p[h][k] tau_k x_k ; collected = sum_h x_h b[h]
  std::vector<double> b(n, 0.0);
  double collected = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    if (!guard::indirect_payer(h)) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += p(h, k) * tau[k] * x[k];
    b[h] = s;
    collected += x[h] * s;
  }
  const WelfareMass mass = welfare_mass(params, x);
  const double two_s = 2.0 * params.exchange_amount();
  const double advance_scale = two_s * collected / mass.all;
  const double retreat_scale = two_s * mass.eligible / mass.all;

  for (std::size_t i = 0; i < n; ++i) {
    double direct = 0.0;
    const std::size_t h_lo = i == 0 ? 0 : i - 1;
    const std::size_t h_hi = std::min(i + 1, n - 1);
    for (std::size_t h = h_lo; h <= h_hi; ++h) {
      if (x[h] == 0.0) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += c(i, h, k) * x[k];
      direct += s * x[h];
    }

    double advance = 0.0;
    if (guard::welfare_inflow(i)) advance += w[i - 1] * x[i - 1] / grid.advance_span(i - 1);
    if (guard::welfare_outflow(i, n)) advance -= w[i] * x[i] / grid.advance_span(i);

    double retreat = 0.0;
    if (guard::tax_retreat_inflow(i, n)) retreat += x[i + 1] * b[i + 1] / grid.retreat_span(i + 1);
    if (guard::tax_retreat_outflow(i)) retreat -= x[i] * b[i] / grid.retreat_span(i);

    out[i] = direct + advance_scale * advance + retreat_scale * retreat - x[i] * total;
  }
}

std::vector<double> rhs(const ModelParams& params, std::span<const double> x) {
  std::vector<double> out(params.size());
  rhs(params, x, out);
  return out;
}

std::vector<double> stationarity_residual(const ModelParams& params, std::span<const double> x) {
  check_size(params, x.size());
  const std::size_t n = params.size();
  const auto& c = params.transitions();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t k = 0; k < n; ++k) {
        s += (c(i, h, k) + indirect_variation(params, x, h, k, i)) * x[h] * x[k];
      }
    }
    out[i] = s - x[i];
  }
  return out;
}

}  // namespace kinex
