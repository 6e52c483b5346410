#include "kinex/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kinex/error.hpp"

namespace kinex::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

std::string csv_safe(std::string text) {
  for (char& ch : text) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  return text;
}

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::round(rate * 1e6) / 1e4);
  return buf;
}

}  // namespace

std::uint64_t params_hash(const ModelParams& params) {
  std::ostringstream canon;
  for (double r : params.grid().boundaries()) canon << format_double(r) << ',';
  canon << ';' << format_double(params.exchange_amount()) << ';';
  for (double t : params.tax().rates) canon << format_double(t) << ',';
  canon << ';' << format_double(params.welfare().gamma) << ';';
  for (double w : params.welfare().weights) canon << format_double(w) << ',';
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string params_hash_hex(const ModelParams& params) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(params_hash(params)));
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) fail(ErrorCode::io, "cannot open " + path + " for writing");
  return os;
}

Record& Record::add(std::string_view key, std::string value) {
  entries_.emplace_back(std::string(key), std::move(value));
  return *this;
}

Record& Record::add(std::string_view key, double value) { return add(key, format_double(value)); }

Record& Record::add(std::string_view key, const std::vector<double>& values) {
  return add(key, join(values, ' '));
}

void Record::write(std::ostream& os) const {
  os << "# " << title_ << '\n';
  for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

Record model_record(const ModelParams& params) {
  const auto& grid = params.grid();
  Record r("kinex model");
  r.add("params_hash", params_hash_hex(params));
  r.add("n", std::to_string(params.size()));
  r.add("spacing", grid.boundary(1));
  r.add("exchange_amount", params.exchange_amount());
  r.add("tau_min", params.tax().tau_min);
  r.add("tau_max", params.tax().tau_max);
  r.add("gamma", params.welfare().gamma);
  return r;
}

void write_encounter_csv(std::ostream& os, const EncounterMatrix& p) {
  const std::size_t n = p.size();
  os << "h";
  for (std::size_t k = 0; k < n; ++k) os << ',' << k + 1;
  os << '\n';
  for (std::size_t h = 0; h < n; ++h) {
    os << h + 1;
    for (std::size_t k = 0; k < n; ++k) os << ',' << format_double(p(h, k));
    os << '\n';
  }
}

void write_transition_csv(std::ostream& os, const TransitionTensor& c) {
  const std::size_t n = c.size();
  os << "i,h";
  for (std::size_t k = 0; k < n; ++k) os << ',' << k + 1;
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < n; ++h) {
      os << i + 1 << ',' << h + 1;
      for (std::size_t k = 0; k < n; ++k) os << ',' << format_double(c(i, h, k));
      os << '\n';
    }
  }
}

void write_schedule_csv(std::ostream& os, const ModelParams& params) {
  const auto& grid = params.grid();
  os << "class,r_lower,r_upper,r_avg,tau,w\n";
  for (std::size_t c = 0; c < params.size(); ++c) {
    os << c + 1 << ',' << format_double(grid.boundary(c)) << ',' << format_double(grid.boundary(c + 1)) << ','
       << format_double(grid.average(c)) << ',' << format_double(params.tax().rates[c]) << ','
       << format_double(params.welfare().weights[c]) << '\n';
  }
}

TrajectoryWriter::TrajectoryWriter(std::ostream& os, std::size_t n) : os_(&os) {
  *os_ << "t";
  for (std::size_t c = 0; c < n; ++c) *os_ << ",X_" << c + 1;
  *os_ << ",mu,residual\n";
}

void TrajectoryWriter::operator()(const TrajectorySample& s) {
  *os_ << format_double(s.time);
  for (double v : s.x) *os_ << ',' << format_double(v);
  *os_ << ',' << format_double(s.mu) << ',' << format_double(s.residual) << '\n';
}

void write_equilibrium_record(std::ostream& os, const ModelParams& params, const EquilibriumState& eq) {
  Record r("kinex equilibrium");
  r.add("params_hash", params_hash_hex(params));
  r.add("mu", eq.mu);
  r.add("residual", eq.residual);
  r.add("step_difference", eq.step_difference);
  r.add("elapsed_time", eq.elapsed_time);
  r.add("steps", std::to_string(eq.steps));
  r.add("rate", eq.rate_estimate);
  r.add("rate_fit_r2", eq.rate_fit_r2);
  r.add("max_sum_drift", eq.max_sum_drift);
  r.add("max_mu_drift", eq.max_mu_drift);
  r.add("x", eq.x);
  r.write(os);
}

void write_indicator_csv(std::ostream& os, const ModelParams& params, const IndicatorBundle& b) {
  const auto& m = b.mobility;
  os << "n,spacing,S,tau_min,tau_max,gamma,mu,G,TR,M,P_exch_collective,P_welf_collective";
  for (std::size_t j = 0; j < m.individual.size(); ++j) os << ",P_individual_" << m.first_class + j + 1;
  for (std::size_t j = 0; j < m.class_total.size(); ++j) os << ",P_class_" << m.first_class + j + 1;
  os << '\n';
  os << params.size() << ',' << format_double(params.grid().boundary(1)) << ','
     << format_double(params.exchange_amount()) << ',' << format_double(params.tax().tau_min) << ','
     << format_double(params.tax().tau_max) << ',' << format_double(params.welfare().gamma) << ','
     << format_double(b.mu) << ',' << format_double(b.gini) << ',' << format_double(b.tax_revenue) << ','
     << format_double(m.mobility) << ',' << format_double(m.exchange_collective) << ','
     << format_double(m.welfare_collective);
  for (double v : m.individual) os << ',' << format_double(v);
  for (double v : m.class_total) os << ',' << format_double(v);
  os << '\n';
}

void write_indicator_record(std::ostream& os, const ModelParams& params, const IndicatorBundle& b) {
  Record r("kinex indicators");
  r.add("params_hash", params_hash_hex(params));
  r.add("mu", b.mu);
  r.add("gini", b.gini);
  r.add("tax_revenue", b.tax_revenue);
  r.add("mobility", b.mobility.mobility);
  r.add("p_exch_collective", b.mobility.exchange_collective);
  r.add("p_welf_collective", b.mobility.welfare_collective);
  r.add("p_individual", b.mobility.individual);
  r.add("p_class", b.mobility.class_total);
  r.write(os);
}

void write_lorenz_csv(std::ostream& os, const LorenzCurve& curve) {
  os << "cum_population,cum_income\n";
  for (const auto& p : curve.points) os << format_double(p.population) << ',' << format_double(p.income) << '\n';
}

void write_mobility_histogram(std::ostream& os, const MobilityReport& m) {
  os << "class,P_exch_individual,P_welf_individual,P_individual,P_exch_class,P_welf_class,P_class\n";
  for (std::size_t j = 0; j < m.individual.size(); ++j) {
    os << m.first_class + j + 1 << ',' << format_double(m.exchange_individual[j]) << ','
       << format_double(m.welfare_individual[j]) << ',' << format_double(m.individual[j]) << ','
       << format_double(m.exchange_class[j]) << ',' << format_double(m.welfare_class[j]) << ','
       << format_double(m.class_total[j]) << '\n';
  }
}

void write_mobility_delta(std::ostream& os, const MobilityDelta& d) {
  os << "class,dP_individual,dP_class,dP_exch_class,dP_welf_class\n";
  for (std::size_t j = 0; j < d.individual.size(); ++j) {
    os << d.first_class + j + 1 << ',' << format_double(d.individual[j]) << ',' << format_double(d.class_total[j])
       << ',' << format_double(d.exchange_class[j]) << ',' << format_double(d.welfare_class[j]) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "tau_min,tau_max,delta_tau,gamma,mu,G,M,TR,converged\n";
  for (const auto& c : cells) {
    os << format_double(c.tau_min) << ',' << format_double(c.tau_max) << ',' << format_double(c.delta_tau) << ','
       << format_double(c.gamma) << ',' << format_double(c.mu) << ',' << format_double(c.gini) << ','
       << format_double(c.mobility) << ',' << format_double(c.tax_revenue) << ',' << (c.converged ? 1 : 0)
       << '\n';
  }
}

void write_level_line_csv(std::ostream& os, const LevelLine& line) {
  os << "tau_range,delta_tau,gamma,G,M\n";
  for (const auto& p : line.points) {
    os << percent(p.tau_min) << " - " << percent(p.tau_max) << ',' << format_double(p.delta_tau) << ','
       << format_double(p.gamma) << ',' << format_double(p.gini) << ',' << format_double(p.mobility) << '\n';
  }
}

void write_level_line_table(std::ostream& os, const LevelLine& line, std::string_view label) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "Level line %.*s (target G = %.3f, tolerance %g)\n",
                static_cast<int>(label.size()), label.data(), line.target_gini, line.tolerance);
  os << buf;
  os << "tau_min - tau_max   delta_tau   gamma    G       M\n";
  for (const auto& p : line.points) {
    const std::string range = percent(p.tau_min) + " - " + percent(p.tau_max);
    std::snprintf(buf, sizeof buf, "%-19s %-11.3g %-8.3f %-7.3f %.6f\n", range.c_str(), p.delta_tau, p.gamma,
                  p.gini, p.mobility);
    os << buf;
  }
  for (const auto& w : line.warnings) os << "skipped: " << w << '\n';
}

void write_kappa_csv(std::ostream& os, const std::vector<KappaTableRow>& rows) {
  os << "alpha,kappa,G,flag\n";
  for (const auto& r : rows) {
    os << format_double(r.alpha) << ',' << format_double(r.kappa) << ',' << format_double(r.gini) << ','
       << (r.flagged ? csv_safe(r.note) : std::string("ok")) << '\n';
  }
}

}  // namespace kinex::io
