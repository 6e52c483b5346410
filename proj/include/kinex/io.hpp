#pragma once

// CSV and plain-text record output. Every writer emits a header row; classes
// are labelled 1..n in files. Doubles use the shortest round-trip form.

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinex/dynamics.hpp"
#include "kinex/indicators.hpp"
#include "kinex/kaniadakis.hpp"
#include "kinex/model.hpp"
#include "kinex/sweep.hpp"

namespace kinex::io {

std::string format_double(double v);

// FNV-1a over the canonical text form of the model (grid, S, rates, weights).
std::uint64_t params_hash(const ModelParams& params);
std::string params_hash_hex(const ModelParams& params);

std::ofstream open_output(const std::string& path);

// Ordered `key = value` lines with a leading comment.
class Record {
 public:
  explicit Record(std::string title) : title_(std::move(title)) {}

  Record& add(std::string_view key, std::string value);
  Record& add(std::string_view key, double value);
  Record& add(std::string_view key, const std::vector<double>& values);

  void write(std::ostream& os) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::string title_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

Record model_record(const ModelParams& params);

void write_encounter_csv(std::ostream& os, const EncounterMatrix& p);
void write_transition_csv(std::ostream& os, const TransitionTensor& c);
void write_schedule_csv(std::ostream& os, const ModelParams& params);

class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& os, std::size_t n);
  void operator()(const TrajectorySample& sample);

 private:
  std::ostream* os_;
};

void write_equilibrium_record(std::ostream& os, const ModelParams& params, const EquilibriumState& eq);

void write_indicator_csv(std::ostream& os, const ModelParams& params, const IndicatorBundle& bundle);
void write_indicator_record(std::ostream& os, const ModelParams& params, const IndicatorBundle& bundle);
void write_lorenz_csv(std::ostream& os, const LorenzCurve& curve);
void write_mobility_histogram(std::ostream& os, const MobilityReport& report);
void write_mobility_delta(std::ostream& os, const MobilityDelta& delta);

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);
void write_level_line_csv(std::ostream& os, const LevelLine& line);
// Fixed-width text table: rate range, delta_tau, gamma, G, M.
void write_level_line_table(std::ostream& os, const LevelLine& line, std::string_view label);

void write_kappa_csv(std::ostream& os, const std::vector<KappaTableRow>& rows);

}  // namespace kinex::io
