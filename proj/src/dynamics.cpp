#include "kinex/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "kinex/error.hpp"

namespace kinex {

namespace {

constexpr double kNegativityFloor = -1e-12;
constexpr double kMuMatchTol = 1e-10;

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void check_mu_range(const IncomeGrid& grid, double mu) {
  const double lo = grid.average(0);
  const double hi = grid.average(grid.size() - 1);
  if (!(mu >= lo && mu <= hi)) {
    fail(ErrorCode::invalid_argument,
         "mean income " + fmt(mu) + " outside the attainable range [" + fmt(lo) + ", " + fmt(hi) + "]");
  }
}

std::vector<double> geometric_profile(std::size_t n, double log_ratio) {
  // Normalised against the largest term so extreme ratios cannot overflow.
  const double anchor = log_ratio < 0.0 ? 0.0 : static_cast<double>(n - 1);
  std::vector<double> x(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::exp((static_cast<double>(j) - anchor) * log_ratio);
    total += x[j];
  }
  for (double& v : x) v /= total;
  return x;
}

std::vector<double> low_middle_weighted(const InitialConditionSpec& spec, const IncomeGrid& grid) {
  const std::size_t n = grid.size();
  if (!spec.target_mu) {
    if (!(spec.decay > 0.0) || !std::isfinite(spec.decay)) {
      fail(ErrorCode::invalid_argument, "decay ratio must be positive");
    }
    return geometric_profile(n, std::log(spec.decay));
  }
  const double mu = *spec.target_mu;
  check_mu_range(grid, mu);
  std::vector<double> x(n, 0.0);
  if (mu == grid.average(0)) {
    x.front() = 1.0;
    return x;
  }
  if (mu == grid.average(n - 1)) {
    x.back() = 1.0;
    return x;
  }
  double lo = -50.0;
  double hi = 50.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (grid.mean_income(geometric_profile(n, mid)) < mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  x = geometric_profile(n, 0.5 * (lo + hi));
  if (std::abs(grid.mean_income(x) - mu) > kMuMatchTol) {
    fail(ErrorCode::invalid_argument, "cannot reach mean income " + fmt(mu) + " with a geometric profile");
  }
  return x;
}

class RateTracker {
 public:
  void add(double t, double residual) {
    if (!(residual > 0.0)) return;
    const double y = std::log(residual);
    if (samples_.empty() || y < min_log_) min_log_ = y;
    samples_.push_back({t, y});
    const double ceiling = min_log_ + std::log(10.0);
    while (!samples_.empty() && samples_.front().y > ceiling) samples_.pop_front();
  }

  // Least-squares fit of log residual against time over the retained decade.
  void fit(double& rate, double& r2) const {
    rate = 0.0;
    r2 = 0.0;
    const std::size_t m = samples_.size();
    if (m < 3) return;
    double st = 0.0, sy = 0.0;
    for (const auto& s : samples_) {
      st += s.t;
      sy += s.y;
    }
    const double tm = st / static_cast<double>(m);
    const double ym = sy / static_cast<double>(m);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (const auto& s : samples_) {
      stt += (s.t - tm) * (s.t - tm);
      sty += (s.t - tm) * (s.y - ym);
      syy += (s.y - ym) * (s.y - ym);
    }
    if (stt <= 0.0 || syy <= 0.0) return;
    const double slope = sty / stt;
    rate = -slope;
    r2 = sty * sty / (stt * syy);
  }

 private:
  struct Sample {
    double t;
    double y;
  };
  std::deque<Sample> samples_;
  double min_log_ = 0.0;
};

}  // namespace

void IntegrationSettings::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::invalid_argument, "dt must be positive");
  if (!(max_time > 0.0)) fail(ErrorCode::invalid_argument, "max_time must be positive");
  if (!(convergence_tol > 0.0)) fail(ErrorCode::invalid_argument, "convergence_tol must be positive");
  if (!(drift_tol > 0.0)) fail(ErrorCode::invalid_argument, "drift_tol must be positive");
}

std::vector<double> make_initial_condition(const InitialConditionSpec& spec, const IncomeGrid& grid) {
  const std::size_t n = grid.size();
  std::vector<double> x;
  switch (spec.kind) {
    case InitialKind::uniform:
      x.assign(n, 1.0 / static_cast<double>(n));
      break;
    case InitialKind::two_point: {
      const std::size_t a = spec.class_a;
      const std::size_t b = spec.class_b;
      if (!(a < b && b < n)) {
        fail(ErrorCode::invalid_argument, "two-point classes must satisfy a < b < n");
      }
      double share_b = 0.5;
      if (spec.target_mu) {
        const double mu = *spec.target_mu;
        if (!(mu >= grid.average(a) && mu <= grid.average(b))) {
          fail(ErrorCode::invalid_argument,
               "mean income " + fmt(mu) + " is not reachable by mixing classes " + std::to_string(a + 1) +
                   " and " + std::to_string(b + 1));
        }
        share_b = (mu - grid.average(a)) / (grid.average(b) - grid.average(a));
      }
      x.assign(n, 0.0);
      x[a] = 1.0 - share_b;
      x[b] = share_b;
      break;
    }
    case InitialKind::low_middle_weighted:
      return low_middle_weighted(spec, grid);
    case InitialKind::explicit_values:
      if (spec.values.size() != n) {
        fail(ErrorCode::invalid_argument, "explicit initial condition must have " + std::to_string(n) + " values");
      }
      validate_simplex(spec.values);
      x = spec.values;
      break;
  }
  if (spec.target_mu) {
    check_mu_range(grid, *spec.target_mu);
    if (std::abs(grid.mean_income(x) - *spec.target_mu) > kMuMatchTol) {
      fail(ErrorCode::invalid_argument, "initial condition has mean income " + fmt(grid.mean_income(x)) +
                                            ", target is " + fmt(*spec.target_mu));
    }
  }
  return x;
}

EquilibriumState integrate(const ModelParams& params, std::vector<double> x0,
                           const IntegrationSettings& settings, const TrajectoryObserver& observer,
                           std::size_t stride) {
  settings.validate();
  const std::size_t n = params.size();
  if (x0.size() != n) fail(ErrorCode::invalid_argument, "initial state has the wrong dimension");
  validate_simplex(x0);
  if (stride == 0) stride = 1;

  const auto& grid = params.grid();
  const double mu0 = grid.mean_income(x0);
  const double dt = settings.dt;

  std::vector<double> x = std::move(x0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n), next(n);

  EquilibriumState out;
  rhs(params, x, k1);
  double residual = sup_norm(k1);
  if (observer) observer({0.0, x, mu0, residual});

  RateTracker tracker;
  tracker.add(0.0, residual);

  std::size_t steps = 0;
  double t = 0.0;
  while (residual >= settings.convergence_tol) {
    if (t >= settings.max_time) {
      throw NonConvergenceError("no convergence by t = " + fmt(t) + " (residual " + fmt(residual) + ")",
                                std::move(x), residual);
    }
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * dt * k1[j];
    rhs(params, stage, k2);
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * dt * k2[j];
    rhs(params, stage, k3);
    for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + dt * k3[j];
    rhs(params, stage, k4);

    double total = 0.0;
    double diff = 0.0;
    double lowest = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      total += next[j];
      diff = std::max(diff, std::abs(next[j] - x[j]));
      lowest = std::min(lowest, next[j]);
    }
    ++steps;
    t = static_cast<double>(steps) * dt;

    if (lowest < kNegativityFloor) {
      fail(ErrorCode::stability, "population went negative (" + fmt(lowest) + ") at t = " + fmt(t) +
                                     "; reduce dt");
    }
    const double sum_drift = std::abs(total - 1.0);
    out.max_sum_drift = std::max(out.max_sum_drift, sum_drift);
    if (sum_drift > settings.drift_tol) {
      fail(ErrorCode::conservation, "population sum drifted by " + fmt(sum_drift) + " at t = " + fmt(t));
    }
    if (settings.renormalize) {
      for (double& v : next) v /= total;
    }
    x.swap(next);
    out.step_difference = diff;

    const double mu = grid.mean_income(x);
    const double mu_drift = std::abs(mu - mu0);
    out.max_mu_drift = std::max(out.max_mu_drift, mu_drift);
    if (mu_drift > settings.drift_tol) {
      fail(ErrorCode::conservation, "mean income drifted by " + fmt(mu_drift) + " at t = " + fmt(t));
    }

    rhs(params, x, k1);
    residual = sup_norm(k1);
    tracker.add(t, residual);
    if (observer && (steps % stride == 0 || residual < settings.convergence_tol)) {
      observer({t, x, mu, residual});
    }
  }

  out.mu = grid.mean_income(x);
  out.x = std::move(x);
  out.residual = residual;
  out.elapsed_time = t;
  out.steps = steps;
  tracker.fit(out.rate_estimate, out.rate_fit_r2);
  return out;
}

EquilibriumState solve_equilibrium(const ModelParams& params, double mu, const IntegrationSettings& settings) {
  check_mu_range(params.grid(), mu);
  InitialConditionSpec spec;
  spec.kind = InitialKind::low_middle_weighted;
  spec.target_mu = mu;
  EquilibriumState eq = integrate(params, make_initial_condition(spec, params.grid()), settings);

  const double check = sup_norm(stationarity_residual(params, eq.x));
  if (check > 10.0 * settings.convergence_tol) {
    fail(ErrorCode::internal_consistency,
         "equilibrium fails the stationarity conditions (residual " + fmt(check) + ")");
  }
  return eq;
}

}  // namespace kinex
