#pragma once

// JSON run configuration. Every block is optional; missing keys keep the
// library defaults and unknown keys are rejected.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "kinex/kinex.h"

namespace kinex_cli {

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mean income given either as a number or as the string "calibrate".
struct MuChoice {
  bool calibrate = true;
  double value = 0.0;
};

struct InitialBlock {
  kinex_initial_kind kind = KINEX_IC_LOW_MIDDLE;
  size_t class_a = 0;  // 1-based in the file, stored 0-based
  size_t class_b = 0;
  double decay = 0.7;
  std::vector<double> values;
  std::optional<MuChoice> target_mu;
};

struct IntegrationBlock {
  kinex_integration_settings settings{};
  size_t trajectory_stride = 0;  // 0 disables the trajectory file
};

struct SweepBlock {
  std::vector<double> delta_tau;
  std::vector<double> gamma;
  MuChoice mu;
  double rate_center = 0.375;
};

struct LevelLineBlock {
  std::vector<double> targets;
  std::vector<std::string> labels;
  std::vector<double> delta_tau;
  MuChoice mu;
  kinex_levelline_options options{};
};

struct KappaBlock {
  std::vector<double> alpha;
  std::vector<double> kappa;
  std::vector<double> rest_energy_ratios;
  kinex_quadrature quadrature{};
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  kinex_model_config model{};
  InitialBlock initial;
  IntegrationBlock integration;
  kinex_calibration calibration{};
  std::optional<SweepBlock> sweep;
  std::optional<LevelLineBlock> levelline;
  std::optional<KappaBlock> kappa;
  nlohmann::json source;  // the parsed document, echoed into manifests
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Expands {"from": a, "to": b, "step": s} or passes an array through.
std::vector<double> number_list(const nlohmann::json& node, const std::string& where);

}  // namespace kinex_cli
