#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace kinex_cli {

using nlohmann::json;

namespace {

void only_keys(const json& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : node.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& node, const std::string& where) {
  if (!node.is_number()) throw ConfigError(where + " must be a number");
  return node.get<double>();
}

long long integer(const json& node, const std::string& where) {
  if (!node.is_number_integer()) throw ConfigError(where + " must be an integer");
  return node.get<long long>();
}

size_t count(const json& node, const std::string& where) {
  const long long v = integer(node, where);
  if (v < 0) throw ConfigError(where + " must be nonnegative");
  return static_cast<size_t>(v);
}

// Reads node[key] into out when present.
void read(const json& node, const char* key, double& out, const std::string& where) {
  if (node.contains(key)) out = number(node[key], where + "." + key);
}

MuChoice mu_choice(const json& node, const std::string& where) {
  if (node.is_string()) {
    if (node.get<std::string>() != "calibrate") throw ConfigError(where + " must be a number or \"calibrate\"");
    return {true, 0.0};
  }
  return {false, number(node, where)};
}

kinex_initial_kind initial_kind(const json& node) {
  if (!node.is_string()) throw ConfigError("initial_condition.kind must be a string");
  const auto s = node.get<std::string>();
  if (s == "uniform") return KINEX_IC_UNIFORM;
  if (s == "low_middle") return KINEX_IC_LOW_MIDDLE;
  if (s == "two_point") return KINEX_IC_TWO_POINT;
  if (s == "explicit") return KINEX_IC_EXPLICIT;
  throw ConfigError("initial_condition.kind '" + s + "' is not one of uniform, low_middle, two_point, explicit");
}

size_t class_index(const json& node, const std::string& where) {
  const size_t c = count(node, where);
  if (c == 0) throw ConfigError(where + " counts classes from 1");
  return c - 1;
}

}  // namespace

std::vector<double> number_list(const json& node, const std::string& where) {
  std::vector<double> out;
  if (node.is_array()) {
    for (size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (node.is_object()) {
    only_keys(node, where, {"from", "to", "step"});
    if (!node.contains("from") || !node.contains("to") || !node.contains("step")) {
      throw ConfigError(where + " range needs from, to and step");
    }
    const double from = number(node["from"], where + ".from");
    const double to = number(node["to"], where + ".to");
    const double step = number(node["step"], where + ".step");
    if (!(step > 0.0) || !(to >= from)) throw ConfigError(where + " range needs step > 0 and to >= from");
    const auto steps = static_cast<long long>(std::floor((to - from) / step + 1e-9));
    // Rounded so that e.g. 0.05 steps print as 0.85 rather than 0.8500000000000001.
    for (long long i = 0; i <= steps; ++i) {
      out.push_back(std::round((from + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return out;
  }
  throw ConfigError(where + " must be an array or a {from, to, step} range");
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "config",
            {"schema_version", "model", "initial_condition", "integration", "calibration", "sweep", "levelline",
             "kappa"});
  RunConfig cfg;
  cfg.source = doc;
  if (!doc.contains("schema_version")) throw ConfigError("config lacks schema_version");
  cfg.schema_version = static_cast<int>(integer(doc["schema_version"], "schema_version"));
  if (cfg.schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }

  kinex_model_config_default(&cfg.model);
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    only_keys(m, "model", {"n", "c", "S", "tau_min", "tau_max", "gamma"});
    if (m.contains("n")) cfg.model.n = static_cast<int>(integer(m["n"], "model.n"));
    read(m, "c", cfg.model.spacing, "model");
    read(m, "S", cfg.model.exchange_amount, "model");
    read(m, "tau_min", cfg.model.tau_min, "model");
    read(m, "tau_max", cfg.model.tau_max, "model");
    read(m, "gamma", cfg.model.gamma, "model");
  }

  if (doc.contains("initial_condition")) {
    const auto& ic = doc["initial_condition"];
    only_keys(ic, "initial_condition", {"kind", "class_a", "class_b", "decay", "values", "target_mu"});
    if (ic.contains("kind")) cfg.initial.kind = initial_kind(ic["kind"]);
    if (ic.contains("class_a")) cfg.initial.class_a = class_index(ic["class_a"], "initial_condition.class_a");
    if (ic.contains("class_b")) cfg.initial.class_b = class_index(ic["class_b"], "initial_condition.class_b");
    read(ic, "decay", cfg.initial.decay, "initial_condition");
    if (ic.contains("values")) cfg.initial.values = number_list(ic["values"], "initial_condition.values");
    if (ic.contains("target_mu")) cfg.initial.target_mu = mu_choice(ic["target_mu"], "initial_condition.target_mu");
    if (cfg.initial.kind == KINEX_IC_EXPLICIT && cfg.initial.values.empty()) {
      throw ConfigError("initial_condition.kind explicit needs values");
    }
  }

  kinex_integration_settings_default(&cfg.integration.settings);
  if (doc.contains("integration")) {
    const auto& in = doc["integration"];
    only_keys(in, "integration",
              {"dt", "max_time", "convergence_tol", "drift_tol", "renormalize", "trajectory_stride"});
    auto& s = cfg.integration.settings;
    read(in, "dt", s.dt, "integration");
    read(in, "max_time", s.max_time, "integration");
    read(in, "convergence_tol", s.convergence_tol, "integration");
    read(in, "drift_tol", s.drift_tol, "integration");
    if (in.contains("renormalize")) {
      if (!in["renormalize"].is_boolean()) throw ConfigError("integration.renormalize must be true or false");
      s.renormalize = in["renormalize"].get<bool>() ? 1 : 0;
    }
    if (in.contains("trajectory_stride")) {
      cfg.integration.trajectory_stride = count(in["trajectory_stride"], "integration.trajectory_stride");
    }
  }

  kinex_calibration_default(&cfg.calibration);
  if (doc.contains("calibration")) {
    const auto& c = doc["calibration"];
    only_keys(c, "calibration",
              {"tau_min", "tau_max", "gamma", "target_gini", "mu_lo", "mu_hi", "gini_tol", "mu_tol",
               "max_iterations"});
    auto& k = cfg.calibration;
    read(c, "tau_min", k.tau_min, "calibration");
    read(c, "tau_max", k.tau_max, "calibration");
    read(c, "gamma", k.gamma, "calibration");
    read(c, "target_gini", k.target_gini, "calibration");
    read(c, "mu_lo", k.mu_lo, "calibration");
    read(c, "mu_hi", k.mu_hi, "calibration");
    read(c, "gini_tol", k.gini_tol, "calibration");
    read(c, "mu_tol", k.mu_tol, "calibration");
    if (c.contains("max_iterations")) {
      k.max_iterations = static_cast<int>(integer(c["max_iterations"], "calibration.max_iterations"));
    }
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    only_keys(s, "sweep", {"delta_tau", "gamma", "mu", "rate_center"});
    SweepBlock b;
    if (s.contains("delta_tau")) b.delta_tau = number_list(s["delta_tau"], "sweep.delta_tau");
    if (s.contains("gamma")) b.gamma = number_list(s["gamma"], "sweep.gamma");
    if (s.contains("mu")) b.mu = mu_choice(s["mu"], "sweep.mu");
    read(s, "rate_center", b.rate_center, "sweep");
    cfg.sweep = std::move(b);
  }

  if (doc.contains("levelline")) {
    const auto& l = doc["levelline"];
    only_keys(l, "levelline",
              {"targets", "labels", "delta_tau", "mu", "gamma_lo", "gamma_hi", "tolerance", "max_iterations",
               "rate_center"});
    LevelLineBlock b;
    kinex_levelline_options_default(&b.options);
    if (l.contains("targets")) b.targets = number_list(l["targets"], "levelline.targets");
    if (l.contains("delta_tau")) b.delta_tau = number_list(l["delta_tau"], "levelline.delta_tau");
    if (l.contains("labels")) {
      if (!l["labels"].is_array()) throw ConfigError("levelline.labels must be an array of strings");
      for (const auto& v : l["labels"]) {
        if (!v.is_string()) throw ConfigError("levelline.labels must be an array of strings");
        b.labels.push_back(v.get<std::string>());
      }
    }
    if (l.contains("mu")) b.mu = mu_choice(l["mu"], "levelline.mu");
    read(l, "gamma_lo", b.options.gamma_lo, "levelline");
    read(l, "gamma_hi", b.options.gamma_hi, "levelline");
    read(l, "tolerance", b.options.tolerance, "levelline");
    read(l, "rate_center", b.options.rate_center, "levelline");
    if (l.contains("max_iterations")) {
      b.options.max_iterations = static_cast<int>(integer(l["max_iterations"], "levelline.max_iterations"));
    }
    if (!b.labels.empty() && b.labels.size() != b.targets.size()) {
      throw ConfigError("levelline.labels must match levelline.targets in length");
    }
    cfg.levelline = std::move(b);
  }

  if (doc.contains("kappa")) {
    const auto& k = doc["kappa"];
    only_keys(k, "kappa", {"alpha", "kappa", "rest_energy_ratios", "abs_tol", "max_depth", "tail_margin"});
    KappaBlock b;
    kinex_quadrature_default(&b.quadrature);
    if (k.contains("alpha")) b.alpha = number_list(k["alpha"], "kappa.alpha");
    if (k.contains("kappa")) b.kappa = number_list(k["kappa"], "kappa.kappa");
    if (k.contains("rest_energy_ratios")) {
      b.rest_energy_ratios = number_list(k["rest_energy_ratios"], "kappa.rest_energy_ratios");
    }
    read(k, "abs_tol", b.quadrature.abs_tol, "kappa");
    read(k, "tail_margin", b.quadrature.tail_margin, "kappa");
    if (k.contains("max_depth")) b.quadrature.max_depth = static_cast<unsigned>(count(k["max_depth"], "kappa.max_depth"));
    cfg.kappa = std::move(b);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace kinex_cli
