#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "kinex/kinex.h"
#include "run_config.hpp"

namespace kinex_cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StatusError : std::runtime_error {
  StatusError(kinex_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  kinex_status status;
};

void check(kinex_status status, const std::string& context) {
  if (status != KINEX_OK) {
    throw StatusError(status, context + ": " + kinex_status_name(status) + ": " + kinex_last_error());
  }
}

int exit_code_for(kinex_status status) {
  switch (status) {
    case KINEX_ERR_INVALID_ARGUMENT:
    case KINEX_ERR_NULL_POINTER:
    case KINEX_ERR_BUFFER_TOO_SMALL:
    case KINEX_ERR_IO:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};

using ModelPtr = std::unique_ptr<kinex_model, Deleter<kinex_model, kinex_model_destroy>>;
using EquilibriumPtr = std::unique_ptr<kinex_equilibrium, Deleter<kinex_equilibrium, kinex_equilibrium_destroy>>;
using SweepPtr = std::unique_ptr<kinex_sweep, Deleter<kinex_sweep, kinex_sweep_destroy>>;
using LevelLinePtr = std::unique_ptr<kinex_levelline, Deleter<kinex_levelline, kinex_levelline_destroy>>;
using KappaTablePtr = std::unique_ptr<kinex_kappa_table, Deleter<kinex_kappa_table, kinex_kappa_table_destroy>>;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Key/value lines for manifest.txt.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }
  void set(const std::string& key, double value) { set(key, num(value)); }
  void output(const std::string& file) { outputs_.push_back(file); }

  void write(const fs::path& path) const {
    std::ofstream os(path);
    if (!os) {
      std::cerr << "warning: cannot write manifest " << path.string() << '\n';
      return;
    }
    os << "# kinex run manifest\n";
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
    os << "outputs =";
    for (const auto& f : outputs_) os << ' ' << f;
    os << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> outputs_;
};

json model_json(const kinex_model_config& m) {
  return {{"n", m.n},          {"c", m.spacing},          {"S", m.exchange_amount},
          {"tau_min", m.tau_min}, {"tau_max", m.tau_max}, {"gamma", m.gamma}};
}

json integration_json(const IntegrationBlock& b) {
  const auto& s = b.settings;
  return {{"dt", s.dt},
          {"max_time", s.max_time},
          {"convergence_tol", s.convergence_tol},
          {"drift_tol", s.drift_tol},
          {"renormalize", s.renormalize != 0},
          {"trajectory_stride", b.trajectory_stride}};
}

json calibration_json(const kinex_calibration& c) {
  return {{"tau_min", c.tau_min},   {"tau_max", c.tau_max}, {"gamma", c.gamma},
          {"target_gini", c.target_gini}, {"mu_lo", c.mu_lo}, {"mu_hi", c.mu_hi},
          {"gini_tol", c.gini_tol}, {"mu_tol", c.mu_tol},   {"max_iterations", c.max_iterations}};
}

// The configuration with every default filled in.
json effective_json(const RunConfig& cfg) {
  json out = cfg.source;
  out["schema_version"] = cfg.schema_version;
  out["model"] = model_json(cfg.model);
  out["integration"] = integration_json(cfg.integration);
  out["calibration"] = calibration_json(cfg.calibration);
  return out;
}

class Runner {
 public:
  Runner(const Options& options, Manifest& manifest) : opt_(options), manifest_(manifest) {}

  int simulate() {
    const RunConfig cfg = load(opt_.config_path, "config");
    auto result = simulate_one(cfg, "");
    std::printf("mu = %.10g  G = %.6f  TR = %.6g  M = %.6g  residual = %.3g\n", result.indicators.mu,
                result.indicators.gini, result.indicators.tax_revenue, result.indicators.mobility,
                result.info.residual);
    return result.info.converged ? kExitOk : kExitNumerical;
  }

  int compare() {
    if (opt_.config_b_path.empty()) throw ConfigError("compare needs --config-b");
    const RunConfig a = load(opt_.config_path, "config");
    const RunConfig b = load(opt_.config_b_path, "config_b");
    {
      const ModelPtr ma = make_model(a.model);
      const ModelPtr mb = make_model(b.model);
      if (boundaries(ma.get()) != boundaries(mb.get())) {
        throw ConfigError("compare needs both configs on the same income grid (n and spacing)");
      }
    }
    auto ra = simulate_one(a, "_a");
    auto rb = simulate_one(b, "_b");
    if (!ra.info.converged || !rb.info.converged) return kExitNumerical;

    kinex_delta_summary delta{};
    const std::string delta_csv = path("mobility_delta.csv");
    check(kinex_mobility_delta(ra.model.get(), ra.x.data(), rb.model.get(), rb.x.data(), ra.x.size(),
                               delta_csv.c_str(), &delta),
          "mobility delta");
    manifest_.output("mobility_delta.csv");

    std::ofstream os = open("compare.txt");
    os << "# kinex comparison (b - a)\n";
    os << "G_a = " << num(ra.indicators.gini) << "\nG_b = " << num(rb.indicators.gini)
       << "\ndelta_G = " << num(delta.gini) << '\n';
    os << "M_a = " << num(ra.indicators.mobility) << "\nM_b = " << num(rb.indicators.mobility)
       << "\ndelta_M = " << num(delta.mobility) << '\n';
    os << "TR_a = " << num(ra.indicators.tax_revenue) << "\nTR_b = " << num(rb.indicators.tax_revenue) << '\n';
    std::printf("delta_G = %.6g  delta_M = %.6g\n", delta.gini, delta.mobility);
    return kExitOk;
  }

  int sweep() {
    const RunConfig cfg = load(opt_.config_path, "config");
    if (!cfg.sweep) throw ConfigError("sweep needs a sweep block");
    const auto& s = *cfg.sweep;
    if (s.delta_tau.empty() || s.gamma.empty()) throw ConfigError("sweep ranges must not be empty");
    const double mu = resolve_mu(cfg, s.mu);
    kinex_sweep* raw = nullptr;
    const kinex_status st = kinex_sweep_run(&cfg.model, s.delta_tau.data(), s.delta_tau.size(), s.gamma.data(),
                                            s.gamma.size(), mu, s.rate_center, &cfg.integration.settings,
                                            opt_.threads, &raw);
    SweepPtr sweep(raw);
    check(st, "sweep");
    check(kinex_sweep_write_csv(sweep.get(), path("sweep.csv").c_str()), "sweep csv");
    manifest_.output("sweep.csv");

    size_t failed = 0;
    for (size_t i = 0; i < kinex_sweep_size(sweep.get()); ++i) {
      const char* why = kinex_sweep_cell_failure(sweep.get(), i);
      if (why && *why) {
        ++failed;
        std::cerr << "warning: cell " << i << ": " << why << '\n';
      }
    }
    manifest_.set("failed_cells", std::to_string(failed));

    std::ofstream os = open("correlation.txt");
    os << "# kinex sweep correlation\n";
    kinex_correlation corr{};
    if (kinex_sweep_correlation(sweep.get(), &corr) == KINEX_OK) {
      os << "cells = " << corr.cells << "\npearson_G_M = " << num(corr.pearson)
         << "\ndegenerate = " << corr.degenerate << "\nincrements_opposite = " << corr.increments_opposite
         << "\nsign_checks = " << corr.sign_checks << "\nmax_dG_dM = " << num(corr.max_product) << '\n';
      std::printf("cells = %zu  pearson(G, M) = %.6f  increments opposite = %s\n", corr.cells, corr.pearson,
                  corr.increments_opposite ? "yes" : "no");
    } else {
      os << "unavailable = " << kinex_last_error() << '\n';
      std::cerr << "warning: correlation unavailable: " << kinex_last_error() << '\n';
    }
    return kExitOk;
  }

  int levelline() {
    const RunConfig cfg = load(opt_.config_path, "config");
    if (!cfg.levelline) throw ConfigError("levelline needs a levelline block");
    auto l = *cfg.levelline;
    if (l.targets.empty() || l.delta_tau.empty()) throw ConfigError("levelline targets and delta_tau must not be empty");
    l.options.threads = opt_.threads;
    const double mu = resolve_mu(cfg, l.mu);
    for (size_t t = 0; t < l.targets.size(); ++t) {
      const std::string label = t < l.labels.size() ? l.labels[t] : std::string(1, static_cast<char>('A' + t % 26));
      kinex_levelline* raw = nullptr;
      const kinex_status st = kinex_levelline_trace(&cfg.model, l.targets[t], l.delta_tau.data(), l.delta_tau.size(),
                                                    mu, &cfg.integration.settings, &l.options, &raw);
      LevelLinePtr line(raw);
      check(st, "level line " + label);
      const std::string stem = "levelline_" + label;
      check(kinex_levelline_write_csv(line.get(), path(stem + ".csv").c_str()), "level-line csv");
      check(kinex_levelline_write_table(line.get(), label.c_str(), path(stem + ".txt").c_str()), "level-line table");
      manifest_.output(stem + ".csv");
      manifest_.output(stem + ".txt");
      for (size_t w = 0; w < kinex_levelline_warning_count(line.get()); ++w) {
        std::cerr << "warning: line " << label << ": " << kinex_levelline_warning(line.get(), w) << '\n';
      }
      std::printf("line %s (G = %.3f): %zu of %zu points\n", label.c_str(), l.targets[t],
                  kinex_levelline_size(line.get()), l.delta_tau.size());
    }
    return kExitOk;
  }

  int calibrate() {
    const RunConfig cfg = load(opt_.config_path, "config");
    const double mu = calibrate_for(cfg);
    std::ofstream os = open("calibration.txt");
    os << "# kinex calibration\nmu_star = " << num(mu) << "\ngini = " << num(calibrated_->gini)
       << "\niterations = " << calibrated_->iterations << '\n';
    std::printf("mu* = %.10g  G = %.8f  (%d bisection steps)\n", mu, calibrated_->gini, calibrated_->iterations);
    return kExitOk;
  }

  int kappa() {
    const RunConfig cfg = load(opt_.config_path, "config");
    if (!cfg.kappa) throw ConfigError("kappa needs a kappa block");
    const auto& k = *cfg.kappa;
    if (k.alpha.empty() || k.kappa.empty()) throw ConfigError("kappa.alpha and kappa.kappa must not be empty");
    kinex_kappa_table* raw = nullptr;
    const kinex_status st = kinex_kappa_table_run(k.alpha.data(), k.alpha.size(), k.kappa.data(), k.kappa.size(),
                                                  &k.quadrature, opt_.threads, &raw);
    KappaTablePtr table(raw);
    check(st, "kappa table");
    check(kinex_kappa_table_write_csv(table.get(), path("kappa_gini.csv").c_str()), "kappa csv");
    manifest_.output("kappa_gini.csv");
    size_t flagged = 0;
    for (size_t i = 0; i < kinex_kappa_table_size(table.get()); ++i) {
      kinex_kappa_row row{};
      check(kinex_kappa_table_row_get(table.get(), i, &row), "kappa row");
      if (row.flagged) {
        ++flagged;
        std::cerr << "warning: alpha = " << row.alpha << ", kappa = " << row.kappa << ": "
                  << kinex_kappa_table_note(table.get(), i) << '\n';
      }
    }
    manifest_.set("flagged_rows", std::to_string(flagged));

    if (!k.rest_energy_ratios.empty()) {
      std::ofstream os = open("kappa_temperature.csv");
      os << "rest_energy_ratio,kappa,alpha,G,flag\n";
      for (double ratio : k.rest_energy_ratios) {
        double kap = 0.0;
        check(kinex_kappa_from_temperature(ratio, &kap), "temperature map");
        for (double a : k.alpha) {
          double g = NAN;
          const kinex_status gs = kinex_kappa_gini(a, kap, &k.quadrature, &g);
          std::string flag = "ok";
          if (gs != KINEX_OK) {
            if (gs == KINEX_ERR_INVALID_ARGUMENT) check(gs, "kappa gini");
            flag = kinex_status_name(gs);
          }
          os << num(ratio) << ',' << num(kap) << ',' << num(a) << ',' << num(g) << ',' << flag << '\n';
        }
      }
      manifest_.output("kappa_temperature.csv");
    }
    std::printf("%zu rows, %zu flagged\n", kinex_kappa_table_size(table.get()), flagged);
    return kExitOk;
  }

 private:
  struct SimResult {
    ModelPtr model;
    std::vector<double> x;
    kinex_equilibrium_info info{};
    kinex_indicators indicators{};
  };

  RunConfig load(const std::string& file, const std::string& key) {
    if (file.empty()) throw ConfigError("--config is required");
    RunConfig cfg = load_config(file);
    manifest_.set(key + "_path", file);
    manifest_.set(key, effective_json(cfg).dump());
    return cfg;
  }

  std::string path(const std::string& name) const { return (fs::path(opt_.out_dir) / name).string(); }

  std::ofstream open(const std::string& name) {
    std::ofstream os(path(name));
    if (!os) throw StatusError(KINEX_ERR_IO, "cannot open " + path(name) + " for writing");
    manifest_.output(name);
    return os;
  }

  static ModelPtr make_model(const kinex_model_config& config) {
    kinex_model* raw = nullptr;
    check(kinex_model_create(&config, &raw), "model");
    return ModelPtr(raw);
  }

  static std::vector<double> boundaries(const kinex_model* model) {
    std::vector<double> r(kinex_model_size(model) + 1);
    check(kinex_model_array_get(model, KINEX_ARRAY_BOUNDARIES, r.data(), r.size()), "boundaries");
    return r;
  }

  double calibrate_for(const RunConfig& cfg) {
    if (calibrated_) return calibrated_->mu;
    kinex_calibration_result r{};
    check(kinex_calibrate_mu(&cfg.model, &cfg.calibration, &cfg.integration.settings, &r), "calibration");
    calibrated_ = r;
    manifest_.set("mu_star", r.mu);
    manifest_.set("mu_star_gini", r.gini);
    manifest_.set("mu_star_iterations", std::to_string(r.iterations));
    return r.mu;
  }

  double resolve_mu(const RunConfig& cfg, const MuChoice& choice) {
    const double mu = choice.calibrate ? calibrate_for(cfg) : choice.value;
    manifest_.set("mu", mu);
    return mu;
  }

  SimResult simulate_one(const RunConfig& cfg, const std::string& suffix) {
    SimResult res;
    res.model = make_model(cfg.model);
    kinex_model* m = res.model.get();
    const size_t n = kinex_model_size(m);

    char hash[17];
    check(kinex_model_hash(m, hash, sizeof hash), "hash");
    manifest_.set("params_hash" + suffix, hash);

    kinex_initial_spec spec;
    kinex_initial_spec_default(&spec);
    spec.kind = cfg.initial.kind;
    spec.class_a = cfg.initial.class_a;
    spec.class_b = cfg.initial.class_b;
    spec.decay = cfg.initial.decay;
    spec.values = cfg.initial.values.data();
    spec.values_len = cfg.initial.values.size();
    if (cfg.initial.target_mu) {
      spec.has_target_mu = 1;
      spec.target_mu = resolve_mu(cfg, *cfg.initial.target_mu);
    }
    std::vector<double> x0(n);
    check(kinex_initial_condition(m, &spec, x0.data(), n), "initial condition");

    std::string trajectory;
    if (cfg.integration.trajectory_stride > 0) {
      trajectory = path("trajectory" + suffix + ".csv");
      manifest_.output("trajectory" + suffix + ".csv");
    }
    kinex_equilibrium* raw = nullptr;
    const kinex_status st =
        kinex_integrate(m, x0.data(), n, &cfg.integration.settings, cfg.integration.trajectory_stride, nullptr,
                        nullptr, trajectory.empty() ? nullptr : trajectory.c_str(), &raw);
    EquilibriumPtr eq(raw);
    const std::string failure = st == KINEX_OK ? "" : std::string(kinex_last_error());
    if (st != KINEX_OK && st != KINEX_ERR_NON_CONVERGENCE) check(st, "integration");

    check(kinex_equilibrium_info_get(eq.get(), &res.info), "equilibrium info");
    res.x.resize(n);
    check(kinex_equilibrium_state(eq.get(), res.x.data(), n), "equilibrium state");

    auto emit = [&](const std::string& name, auto&& writer) {
      check(writer(path(name + suffix + ".csv").c_str()), name);
      manifest_.output(name + suffix + ".csv");
    };
    check(kinex_equilibrium_write(m, eq.get(), path("equilibrium" + suffix + ".txt").c_str()), "equilibrium record");
    manifest_.output("equilibrium" + suffix + ".txt");
    if (st != KINEX_OK) {
      std::cerr << "error: " << failure << '\n';
      manifest_.set("status" + suffix, "non-convergence");
      return res;
    }

    check(kinex_indicators_eval(m, res.x.data(), n, &res.indicators), "indicators");
    emit("schedule", [&](const char* p) { return kinex_model_write(m, KINEX_FILE_SCHEDULE, p); });
    emit("indicators", [&](const char* p) { return kinex_indicators_write(m, res.x.data(), n, KINEX_FILE_INDICATORS, p); });
    emit("lorenz", [&](const char* p) { return kinex_indicators_write(m, res.x.data(), n, KINEX_FILE_LORENZ, p); });
    emit("mobility", [&](const char* p) { return kinex_indicators_write(m, res.x.data(), n, KINEX_FILE_MOBILITY, p); });
    check(kinex_indicators_write(m, res.x.data(), n, KINEX_FILE_INDICATOR_RECORD,
                                 path("indicators" + suffix + ".txt").c_str()),
          "indicator record");
    manifest_.output("indicators" + suffix + ".txt");
    return res;
  }

  const Options& opt_;
  Manifest& manifest_;
  std::optional<kinex_calibration_result> calibrated_;
};

}  // namespace

int run_command(const Options& options) {
  Manifest manifest;
  manifest.set("command", options.command);
  manifest.set("version", kinex_version());
  manifest.set("schema_version", std::to_string(kSchemaVersion));
  manifest.set("threads", std::to_string(options.threads));

  int code = kExitOk;
  try {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) throw StatusError(KINEX_ERR_IO, "cannot create output directory " + options.out_dir + ": " + ec.message());

    Runner runner(options, manifest);
    if (options.command == "simulate") {
      code = runner.simulate();
    } else if (options.command == "compare") {
      code = runner.compare();
    } else if (options.command == "sweep") {
      code = runner.sweep();
    } else if (options.command == "levelline") {
      code = runner.levelline();
    } else if (options.command == "calibrate") {
      code = runner.calibrate();
    } else if (options.command == "kappa") {
      code = runner.kappa();
    } else {
      throw ConfigError("unknown command " + options.command);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const StatusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kExitNumerical;
  }
  manifest.set("exit_code", std::to_string(code));
  if (fs::is_directory(options.out_dir)) manifest.write(fs::path(options.out_dir) / "manifest.txt");
  return code;
}

}  // namespace kinex_cli
