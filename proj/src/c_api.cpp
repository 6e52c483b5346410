#include "kinex/kinex.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "kinex/dynamics.hpp"
#include "kinex/error.hpp"
#include "kinex/indicators.hpp"
#include "kinex/io.hpp"
#include "kinex/kaniadakis.hpp"
#include "kinex/model.hpp"
#include "kinex/sweep.hpp"

#ifndef KINEX_VERSION_STRING
#define KINEX_VERSION_STRING "0.0.0"
#endif

struct kinex_model {
  kinex::ModelParams params;
};

struct kinex_equilibrium {
  kinex::EquilibriumState state;
  bool converged = true;
};

struct kinex_sweep {
  std::vector<kinex::SweepCell> cells;
};

struct kinex_levelline {
  kinex::LevelLine line;
};

struct kinex_kappa_table {
  std::vector<kinex::KappaTableRow> rows;
};

namespace {

thread_local std::string last_error;

kinex_status status_of(kinex::ErrorCode code) {
  using kinex::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return KINEX_ERR_INVALID_ARGUMENT;
    case ErrorCode::degenerate_state: return KINEX_ERR_DEGENERATE_STATE;
    case ErrorCode::internal_consistency: return KINEX_ERR_INTERNAL_CONSISTENCY;
    case ErrorCode::non_convergence: return KINEX_ERR_NON_CONVERGENCE;
    case ErrorCode::stability: return KINEX_ERR_STABILITY;
    case ErrorCode::conservation: return KINEX_ERR_CONSERVATION;
    case ErrorCode::calibration_failure: return KINEX_ERR_CALIBRATION;
    case ErrorCode::divergent_mean: return KINEX_ERR_DIVERGENT_MEAN;
    case ErrorCode::accuracy: return KINEX_ERR_ACCURACY;
    case ErrorCode::io: return KINEX_ERR_IO;
  }
  return KINEX_ERR_UNKNOWN;
}

kinex_status set_error(kinex_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class F>
kinex_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const kinex::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(KINEX_ERR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return set_error(KINEX_ERR_UNKNOWN, e.what());
  } catch (...) {
    return set_error(KINEX_ERR_UNKNOWN, "unknown exception");
  }
}

kinex_status null_arg(const char* what) {
  return set_error(KINEX_ERR_NULL_POINTER, std::string(what) + " is NULL");
}

kinex_status copy_out(const std::vector<double>& v, double* out, size_t len) {
  if (!out) return null_arg("output buffer");
  if (len < v.size()) {
    return set_error(KINEX_ERR_BUFFER_TOO_SMALL,
                     "buffer holds " + std::to_string(len) + " values, need " + std::to_string(v.size()));
  }
  std::copy(v.begin(), v.end(), out);
  return KINEX_OK;
}

kinex::ModelConfig to_cpp(const kinex_model_config& c) {
  return {c.n, c.spacing, c.exchange_amount, c.tau_min, c.tau_max, c.gamma};
}

kinex::IntegrationSettings to_cpp(const kinex_integration_settings* s) {
  kinex::IntegrationSettings out;
  if (s) {
    out.dt = s->dt;
    out.max_time = s->max_time;
    out.convergence_tol = s->convergence_tol;
    out.drift_tol = s->drift_tol;
    out.renormalize = s->renormalize != 0;
  }
  return out;
}

kinex::QuadratureSettings to_cpp(const kinex_quadrature* q) {
  kinex::QuadratureSettings out;
  if (q) {
    out.abs_tol = q->abs_tol;
    out.max_depth = q->max_depth;
    out.tail_margin = q->tail_margin;
  }
  return out;
}

std::span<const double> state_of(const kinex_model* model, const double* x, size_t n) {
  if (n != model->params.size()) {
    kinex::fail(kinex::ErrorCode::invalid_argument,
                "state has " + std::to_string(n) + " entries, model has " + std::to_string(model->params.size()));
  }
  return {x, n};
}

void write_file(const char* path, auto&& writer) {
  if (!path) kinex::fail(kinex::ErrorCode::invalid_argument, "output path is NULL");
  auto os = kinex::io::open_output(path);
  writer(os);
  os.flush();
  if (!os) kinex::fail(kinex::ErrorCode::io, std::string("write to ") + path + " failed");
}

}  // namespace

extern "C" {

const char* kinex_status_name(kinex_status status) {
  switch (status) {
    case KINEX_OK: return "ok";
    case KINEX_ERR_BUFFER_TOO_SMALL: return "buffer-too-small";
    case KINEX_ERR_NULL_POINTER: return "null-pointer";
    case KINEX_ERR_UNKNOWN: return "unknown";
    default:
      if (status >= KINEX_ERR_INVALID_ARGUMENT && status <= KINEX_ERR_IO) {
        return kinex::to_string(static_cast<kinex::ErrorCode>(status));
      }
      return "unknown";
  }
}

const char* kinex_last_error(void) { return last_error.c_str(); }

const char* kinex_version(void) { return KINEX_VERSION_STRING; }

void kinex_model_config_default(kinex_model_config* config) {
  if (!config) return;
  const kinex::ModelConfig d;
  *config = {d.n, d.spacing, d.exchange_amount, d.tau_min, d.tau_max, d.gamma};
}

kinex_status kinex_model_create(const kinex_model_config* config, kinex_model** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new kinex_model{kinex::ModelParams(to_cpp(*config))};
    return KINEX_OK;
  });
}

void kinex_model_destroy(kinex_model* model) { delete model; }

size_t kinex_model_size(const kinex_model* model) { return model ? model->params.size() : 0; }

kinex_status kinex_model_hash(const kinex_model* model, char* buffer, size_t len) {
  if (!model) return null_arg("model");
  if (!buffer) return null_arg("buffer");
  return guarded([&] {
    const std::string hex = kinex::io::params_hash_hex(model->params);
    if (len < hex.size() + 1) return set_error(KINEX_ERR_BUFFER_TOO_SMALL, "hash needs 17 characters");
    std::memcpy(buffer, hex.c_str(), hex.size() + 1);
    return KINEX_OK;
  });
}

kinex_status kinex_model_array_get(const kinex_model* model, kinex_model_array which, double* out, size_t len) {
  if (!model) return null_arg("model");
  return guarded([&] {
    const auto& p = model->params;
    const std::size_t n = p.size();
    std::vector<double> v;
    switch (which) {
      case KINEX_ARRAY_BOUNDARIES: { const auto s = p.grid().boundaries(); v.assign(s.begin(), s.end()); } break;
      case KINEX_ARRAY_AVERAGES: { const auto s = p.grid().averages(); v.assign(s.begin(), s.end()); } break;
      case KINEX_ARRAY_TAX_RATES: v = p.tax().rates; break;
      case KINEX_ARRAY_WEIGHTS: v = p.welfare().weights; break;
      case KINEX_ARRAY_ENCOUNTER:
        v.reserve(n * n);
        for (std::size_t h = 0; h < n; ++h) {
          for (std::size_t k = 0; k < n; ++k) v.push_back(p.encounter()(h, k));
        }
        break;
      case KINEX_ARRAY_TRANSITION:
        v.reserve(n * n * n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t k = 0; k < n; ++k) v.push_back(p.transitions()(i, h, k));
          }
        }
        break;
      default: return set_error(KINEX_ERR_INVALID_ARGUMENT, "unknown model array");
    }
    return copy_out(v, out, len);
  });
}

kinex_status kinex_model_rhs(const kinex_model* model, const double* x, size_t n, double* out) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] {
    kinex::rhs(model->params, state_of(model, x, n), std::span<double>(out, n));
    return KINEX_OK;
  });
}

kinex_status kinex_model_indirect_variation(const kinex_model* model, const double* x, size_t n, size_t h, size_t k,
                                            size_t i, double* out) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::indirect_variation(model->params, state_of(model, x, n), h, k, i);
    return KINEX_OK;
  });
}

kinex_status kinex_model_check_state(const kinex_model* model, const double* x, size_t n) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  return guarded([&] {
    kinex::validate_simplex(state_of(model, x, n));
    return KINEX_OK;
  });
}

kinex_status kinex_model_write(const kinex_model* model, kinex_model_file which, const char* path) {
  if (!model) return null_arg("model");
  return guarded([&] {
    const auto& p = model->params;
    write_file(path, [&](std::ostream& os) {
      switch (which) {
        case KINEX_FILE_ENCOUNTER: kinex::io::write_encounter_csv(os, p.encounter()); break;
        case KINEX_FILE_TRANSITION: kinex::io::write_transition_csv(os, p.transitions()); break;
        case KINEX_FILE_SCHEDULE: kinex::io::write_schedule_csv(os, p); break;
        case KINEX_FILE_RECORD: kinex::io::model_record(p).write(os); break;
        default: kinex::fail(kinex::ErrorCode::invalid_argument, "unknown model file kind");
      }
    });
    return KINEX_OK;
  });
}

void kinex_integration_settings_default(kinex_integration_settings* settings) {
  if (!settings) return;
  const kinex::IntegrationSettings d;
  *settings = {d.dt, d.max_time, d.convergence_tol, d.drift_tol, d.renormalize ? 1 : 0};
}

void kinex_initial_spec_default(kinex_initial_spec* spec) {
  if (!spec) return;
  const kinex::InitialConditionSpec d;
  *spec = {KINEX_IC_LOW_MIDDLE, 0, 0, d.decay, nullptr, 0, 0, 0.0};
}

kinex_status kinex_initial_condition(const kinex_model* model, const kinex_initial_spec* spec, double* out,
                                     size_t len) {
  if (!model) return null_arg("model");
  if (!spec) return null_arg("spec");
  return guarded([&] {
    kinex::InitialConditionSpec s;
    switch (spec->kind) {
      case KINEX_IC_UNIFORM: s.kind = kinex::InitialKind::uniform; break;
      case KINEX_IC_LOW_MIDDLE: s.kind = kinex::InitialKind::low_middle_weighted; break;
      case KINEX_IC_TWO_POINT: s.kind = kinex::InitialKind::two_point; break;
      case KINEX_IC_EXPLICIT: s.kind = kinex::InitialKind::explicit_values; break;
      default: return set_error(KINEX_ERR_INVALID_ARGUMENT, "unknown initial-condition kind");
    }
    s.class_a = spec->class_a;
    s.class_b = spec->class_b;
    s.decay = spec->decay;
    if (spec->kind == KINEX_IC_EXPLICIT) {
      if (!spec->values && spec->values_len > 0) return null_arg("values");
      s.values.assign(spec->values, spec->values + spec->values_len);
    }
    if (spec->has_target_mu) s.target_mu = spec->target_mu;
    return copy_out(kinex::make_initial_condition(s, model->params.grid()), out, len);
  });
}

kinex_status kinex_integrate(const kinex_model* model, const double* x0, size_t n,
                             const kinex_integration_settings* settings, size_t stride,
                             kinex_trajectory_callback callback, void* user, const char* trajectory_csv,
                             kinex_equilibrium** out) {
  if (!model) return null_arg("model");
  if (!x0) return null_arg("x0");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto x = state_of(model, x0, n);
    std::ofstream csv;
    std::unique_ptr<kinex::io::TrajectoryWriter> writer;
    if (trajectory_csv) {
      csv = kinex::io::open_output(trajectory_csv);
      writer = std::make_unique<kinex::io::TrajectoryWriter>(csv, n);
    }
    kinex::TrajectoryObserver observer;
    if (callback || writer) {
      observer = [&](const kinex::TrajectorySample& s) {
        if (writer) (*writer)(s);
        if (callback) callback(s.time, s.x.data(), s.x.size(), s.mu, s.residual, user);
      };
    }
    try {
      auto state = kinex::integrate(model->params, std::vector<double>(x.begin(), x.end()), to_cpp(settings),
                                    observer, stride == 0 ? 1 : stride);
      *out = new kinex_equilibrium{std::move(state), true};
      return KINEX_OK;
    } catch (const kinex::NonConvergenceError& e) {
      kinex::EquilibriumState partial;
      partial.x = e.last_state();
      partial.residual = e.residual();
      double mu = 0.0;
      for (std::size_t i = 0; i < partial.x.size(); ++i) mu += model->params.grid().average(i) * partial.x[i];
      partial.mu = mu;
      *out = new kinex_equilibrium{std::move(partial), false};
      throw;
    }
  });
}

kinex_status kinex_solve_equilibrium(const kinex_model* model, double mu, const kinex_integration_settings* settings,
                                     kinex_equilibrium** out) {
  if (!model) return null_arg("model");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new kinex_equilibrium{kinex::solve_equilibrium(model->params, mu, to_cpp(settings)), true};
    return KINEX_OK;
  });
}

void kinex_equilibrium_destroy(kinex_equilibrium* eq) { delete eq; }

kinex_status kinex_equilibrium_info_get(const kinex_equilibrium* eq, kinex_equilibrium_info* info) {
  if (!eq) return null_arg("equilibrium");
  if (!info) return null_arg("info");
  const auto& s = eq->state;
  *info = {s.mu,    s.residual,      s.step_difference, s.elapsed_time,       s.rate_estimate,
           s.rate_fit_r2, s.steps, s.max_sum_drift,   s.max_mu_drift, eq->converged ? 1 : 0};
  return KINEX_OK;
}

kinex_status kinex_equilibrium_state(const kinex_equilibrium* eq, double* out, size_t len) {
  if (!eq) return null_arg("equilibrium");
  return copy_out(eq->state.x, out, len);
}

kinex_status kinex_equilibrium_write(const kinex_model* model, const kinex_equilibrium* eq, const char* path) {
  if (!model) return null_arg("model");
  if (!eq) return null_arg("equilibrium");
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { kinex::io::write_equilibrium_record(os, model->params, eq->state); });
    return KINEX_OK;
  });
}

kinex_status kinex_indicators_eval(const kinex_model* model, const double* x, size_t n, kinex_indicators* out) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto b = kinex::evaluate_indicators(model->params, state_of(model, x, n));
    *out = {b.mu, b.gini, b.tax_revenue, b.mobility.mobility, b.mobility.exchange_collective,
            b.mobility.welfare_collective};
    return KINEX_OK;
  });
}

kinex_status kinex_mobility_profile(const kinex_model* model, const double* x, size_t n, kinex_mobility_column which,
                                    double* out, size_t len) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  return guarded([&] {
    const auto m = kinex::mobility_collective(model->params, state_of(model, x, n));
    switch (which) {
      case KINEX_MOB_EXCHANGE_INDIVIDUAL: return copy_out(m.exchange_individual, out, len);
      case KINEX_MOB_WELFARE_INDIVIDUAL: return copy_out(m.welfare_individual, out, len);
      case KINEX_MOB_INDIVIDUAL: return copy_out(m.individual, out, len);
      case KINEX_MOB_EXCHANGE_CLASS: return copy_out(m.exchange_class, out, len);
      case KINEX_MOB_WELFARE_CLASS: return copy_out(m.welfare_class, out, len);
      case KINEX_MOB_CLASS: return copy_out(m.class_total, out, len);
    }
    return set_error(KINEX_ERR_INVALID_ARGUMENT, "unknown mobility column");
  });
}

kinex_status kinex_indicators_write(const kinex_model* model, const double* x, size_t n, kinex_indicator_file which,
                                    const char* path) {
  if (!model) return null_arg("model");
  if (!x) return null_arg("x");
  return guarded([&] {
    const auto state = state_of(model, x, n);
    const auto& p = model->params;
    write_file(path, [&](std::ostream& os) {
      switch (which) {
        case KINEX_FILE_INDICATORS: kinex::io::write_indicator_csv(os, p, kinex::evaluate_indicators(p, state)); break;
        case KINEX_FILE_INDICATOR_RECORD:
          kinex::io::write_indicator_record(os, p, kinex::evaluate_indicators(p, state));
          break;
        case KINEX_FILE_LORENZ: kinex::io::write_lorenz_csv(os, kinex::lorenz(p.grid(), state)); break;
        case KINEX_FILE_MOBILITY:
          kinex::io::write_mobility_histogram(os, kinex::mobility_collective(p, state));
          break;
        default: kinex::fail(kinex::ErrorCode::invalid_argument, "unknown indicator file kind");
      }
    });
    return KINEX_OK;
  });
}

kinex_status kinex_mobility_delta(const kinex_model* model_a, const double* x_a, const kinex_model* model_b,
                                  const double* x_b, size_t n, const char* delta_csv, kinex_delta_summary* out) {
  if (!model_a || !model_b) return null_arg("model");
  if (!x_a || !x_b) return null_arg("x");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto d = kinex::mobility_delta(model_a->params, state_of(model_a, x_a, n), model_b->params,
                                         state_of(model_b, x_b, n));
    if (delta_csv) write_file(delta_csv, [&](std::ostream& os) { kinex::io::write_mobility_delta(os, d); });
    *out = {d.gini, d.mobility};
    return KINEX_OK;
  });
}

void kinex_calibration_default(kinex_calibration* calibration) {
  if (!calibration) return;
  const kinex::CalibrationTarget t;
  const kinex::CalibrationOptions o;
  *calibration = {t.tau_min, t.tau_max, t.gamma, t.target_gini, 50.0, 300.0, o.gini_tol, o.mu_tol, o.max_iterations};
}

kinex_status kinex_calibrate_mu(const kinex_model_config* base, const kinex_calibration* calibration,
                                const kinex_integration_settings* settings, kinex_calibration_result* out) {
  if (!base) return null_arg("base");
  if (!calibration) return null_arg("calibration");
  if (!out) return null_arg("out");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  *out = {nan, nan, 0, nan, nan};
  return guarded([&] {
    const kinex::CalibrationTarget target{calibration->tau_min, calibration->tau_max, calibration->gamma,
                                          calibration->target_gini};
    const kinex::CalibrationOptions options{calibration->gini_tol, calibration->mu_tol,
                                            calibration->max_iterations};
    try {
      const auto r = kinex::calibrate_mu(to_cpp(*base), target, calibration->mu_lo, calibration->mu_hi,
                                         to_cpp(settings), options);
      out->mu = r.mu;
      out->gini = r.gini;
      out->iterations = r.iterations;
      return KINEX_OK;
    } catch (const kinex::CalibrationError& e) {
      out->gini_at_lo = e.g_at_lower();
      out->gini_at_hi = e.g_at_upper();
      throw;
    }
  });
}

kinex_status kinex_sweep_run(const kinex_model_config* base, const double* delta_taus, size_t n_delta,
                             const double* gammas, size_t n_gamma, double mu, double rate_center,
                             const kinex_integration_settings* settings, unsigned threads, kinex_sweep** out) {
  if (!base) return null_arg("base");
  if ((!delta_taus && n_delta) || (!gammas && n_gamma)) return null_arg("grid");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto cells = kinex::sweep_grid(to_cpp(*base), {delta_taus, n_delta}, {gammas, n_gamma}, mu, to_cpp(settings),
                                   threads, rate_center);
    *out = new kinex_sweep{std::move(cells)};
    return KINEX_OK;
  });
}

void kinex_sweep_destroy(kinex_sweep* sweep) { delete sweep; }

size_t kinex_sweep_size(const kinex_sweep* sweep) { return sweep ? sweep->cells.size() : 0; }

kinex_status kinex_sweep_cell_get(const kinex_sweep* sweep, size_t index, kinex_sweep_cell* out) {
  if (!sweep) return null_arg("sweep");
  if (!out) return null_arg("out");
  if (index >= sweep->cells.size()) return set_error(KINEX_ERR_INVALID_ARGUMENT, "cell index out of range");
  const auto& c = sweep->cells[index];
  *out = {c.tau_min, c.tau_max,     c.delta_tau, c.gamma,    c.mu,
          c.gini,    c.mobility, c.tax_revenue, c.residual, c.converged ? 1 : 0};
  return KINEX_OK;
}

const char* kinex_sweep_cell_failure(const kinex_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->cells.size()) return nullptr;
  return sweep->cells[index].failure.c_str();
}

kinex_status kinex_sweep_correlation(const kinex_sweep* sweep, kinex_correlation* out) {
  if (!sweep) return null_arg("sweep");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto r = kinex::correlation_report(sweep->cells);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : r.along_gamma) worst = std::max(worst, s.product);
    for (const auto& s : r.along_delta_tau) worst = std::max(worst, s.product);
    *out = {r.cells, r.pearson, r.degenerate ? 1 : 0, r.increments_opposite ? 1 : 0,
            r.along_gamma.size() + r.along_delta_tau.size(), worst};
    return KINEX_OK;
  });
}

kinex_status kinex_sweep_write_csv(const kinex_sweep* sweep, const char* path) {
  if (!sweep) return null_arg("sweep");
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { kinex::io::write_sweep_csv(os, sweep->cells); });
    return KINEX_OK;
  });
}

void kinex_levelline_options_default(kinex_levelline_options* options) {
  if (!options) return;
  const kinex::LevelLineOptions d;
  *options = {d.gamma_lo, d.gamma_hi, d.tolerance, d.max_iterations, d.rate_center, d.threads};
}

kinex_status kinex_levelline_trace(const kinex_model_config* base, double target_gini, const double* delta_taus,
                                   size_t n_delta, double mu, const kinex_integration_settings* settings,
                                   const kinex_levelline_options* options, kinex_levelline** out) {
  if (!base) return null_arg("base");
  if (!delta_taus && n_delta) return null_arg("delta_taus");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    kinex::LevelLineOptions o;
    if (options) {
      o = {options->gamma_lo, options->gamma_hi, options->tolerance, options->max_iterations, options->rate_center,
           options->threads};
    }
    auto line = kinex::trace_level_line(to_cpp(*base), target_gini, {delta_taus, n_delta}, mu, to_cpp(settings), o);
    *out = new kinex_levelline{std::move(line)};
    return KINEX_OK;
  });
}

void kinex_levelline_destroy(kinex_levelline* line) { delete line; }

size_t kinex_levelline_size(const kinex_levelline* line) { return line ? line->line.points.size() : 0; }

kinex_status kinex_levelline_point_get(const kinex_levelline* line, size_t index, kinex_level_point* out) {
  if (!line) return null_arg("line");
  if (!out) return null_arg("out");
  if (index >= line->line.points.size()) return set_error(KINEX_ERR_INVALID_ARGUMENT, "point index out of range");
  const auto& p = line->line.points[index];
  *out = {p.delta_tau, p.tau_min, p.tau_max, p.gamma, p.gini, p.mobility};
  return KINEX_OK;
}

size_t kinex_levelline_warning_count(const kinex_levelline* line) { return line ? line->line.warnings.size() : 0; }

const char* kinex_levelline_warning(const kinex_levelline* line, size_t index) {
  if (!line || index >= line->line.warnings.size()) return nullptr;
  return line->line.warnings[index].c_str();
}

kinex_status kinex_levelline_write_csv(const kinex_levelline* line, const char* path) {
  if (!line) return null_arg("line");
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { kinex::io::write_level_line_csv(os, line->line); });
    return KINEX_OK;
  });
}

kinex_status kinex_levelline_write_table(const kinex_levelline* line, const char* label, const char* path) {
  if (!line) return null_arg("line");
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { kinex::io::write_level_line_table(os, line->line, label ? label : ""); });
    return KINEX_OK;
  });
}

void kinex_quadrature_default(kinex_quadrature* quadrature) {
  if (!quadrature) return;
  const kinex::QuadratureSettings d;
  *quadrature = {d.abs_tol, d.max_depth, d.tail_margin};
}

kinex_status kinex_kappa_exp(double u, double kappa, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::kappa_exp(u, kappa);
    return KINEX_OK;
  });
}

kinex_status kinex_kappa_log(double y, double kappa, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::kappa_log(y, kappa);
    return KINEX_OK;
  });
}

kinex_status kinex_kappa_quantile(double p, double alpha, double kappa, double beta, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::kgen_quantile(p, {alpha, kappa, beta});
    return KINEX_OK;
  });
}

kinex_status kinex_kappa_gini(double alpha, double kappa, const kinex_quadrature* quadrature, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::kgen_gini(alpha, kappa, to_cpp(quadrature));
    return KINEX_OK;
  });
}

kinex_status kinex_kappa_from_temperature(double rest_energy_ratio, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = kinex::kappa_from_temperature({rest_energy_ratio});
    return KINEX_OK;
  });
}

kinex_status kinex_kappa_table_run(const double* alphas, size_t n_alpha, const double* kappas, size_t n_kappa,
                                   const kinex_quadrature* quadrature, unsigned threads, kinex_kappa_table** out) {
  if ((!alphas && n_alpha) || (!kappas && n_kappa)) return null_arg("grid");
  if (!out) return null_arg("out");
  *out = nullptr;
  if (n_alpha == 0 || n_kappa == 0) {
    return set_error(KINEX_ERR_INVALID_ARGUMENT, "kappa table needs at least one alpha and one kappa");
  }
  return guarded([&] {
    auto rows = kinex::gini_vs_kappa_table({alphas, n_alpha}, {kappas, n_kappa}, to_cpp(quadrature), threads);
    *out = new kinex_kappa_table{std::move(rows)};
    return KINEX_OK;
  });
}

void kinex_kappa_table_destroy(kinex_kappa_table* table) { delete table; }

size_t kinex_kappa_table_size(const kinex_kappa_table* table) { return table ? table->rows.size() : 0; }

kinex_status kinex_kappa_table_row_get(const kinex_kappa_table* table, size_t index, kinex_kappa_row* out) {
  if (!table) return null_arg("table");
  if (!out) return null_arg("out");
  if (index >= table->rows.size()) return set_error(KINEX_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = table->rows[index];
  *out = {r.alpha, r.kappa, r.gini, r.flagged ? 1 : 0};
  return KINEX_OK;
}

const char* kinex_kappa_table_note(const kinex_kappa_table* table, size_t index) {
  if (!table || index >= table->rows.size()) return nullptr;
  return table->rows[index].note.c_str();
}

kinex_status kinex_kappa_table_write_csv(const kinex_kappa_table* table, const char* path) {
  if (!table) return null_arg("table");
  return guarded([&] {
    write_file(path, [&](std::ostream& os) { kinex::io::write_kappa_csv(os, table->rows); });
    return KINEX_OK;
  });
}

}  // extern "C"
