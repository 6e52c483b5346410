#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kinex/kinex.h"

namespace fs = std::filesystem;

namespace {

struct Model {
  kinex_model* handle = nullptr;
  explicit Model(kinex_model_config cfg) { REQUIRE(kinex_model_create(&cfg, &handle) == KINEX_OK); }
  Model() {
    kinex_model_config cfg;
    kinex_model_config_default(&cfg);
    REQUIRE(kinex_model_create(&cfg, &handle) == KINEX_OK);
  }
  ~Model() { kinex_model_destroy(handle); }
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
};

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "kinex_c_api_test";
  fs::create_directories(dir);
  return dir;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<double> equilibrium_state(const Model& m, double mu) {
  kinex_integration_settings s;
  kinex_integration_settings_default(&s);
  kinex_equilibrium* eq = nullptr;
  REQUIRE(kinex_solve_equilibrium(m.handle, mu, &s, &eq) == KINEX_OK);
  std::vector<double> x(kinex_model_size(m.handle));
  REQUIRE(kinex_equilibrium_state(eq, x.data(), x.size()) == KINEX_OK);
  kinex_equilibrium_destroy(eq);
  return x;
}

int callback_calls = 0;
void count_calls(double, const double*, size_t n, double, double, void*) {
  CHECK(n == 15);
  ++callback_calls;
}

}  // namespace

TEST_CASE("status names, version and errors") {
  CHECK(std::strcmp(kinex_status_name(KINEX_OK), "ok") == 0);
  CHECK(std::strlen(kinex_status_name(KINEX_ERR_DIVERGENT_MEAN)) > 0);
  CHECK(std::strcmp(kinex_version(), "0.1.0") == 0);

  kinex_model_config cfg;
  kinex_model_config_default(&cfg);
  CHECK(cfg.n == 15);
  CHECK(cfg.spacing == 25.0);
  cfg.gamma = 0.7;
  kinex_model* m = nullptr;
  CHECK(kinex_model_create(&cfg, &m) == KINEX_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::string(kinex_last_error()).find("gamma") != std::string::npos);
  CHECK(kinex_model_create(nullptr, &m) == KINEX_ERR_NULL_POINTER);
  kinex_model_destroy(nullptr);
}

TEST_CASE("model arrays, hash and rhs") {
  Model m;
  CHECK(kinex_model_size(m.handle) == 15);
  std::vector<double> r(16);
  REQUIRE(kinex_model_array_get(m.handle, KINEX_ARRAY_BOUNDARIES, r.data(), r.size()) == KINEX_OK);
  CHECK(r.back() == 375.0);
  std::vector<double> small(3);
  CHECK(kinex_model_array_get(m.handle, KINEX_ARRAY_AVERAGES, small.data(), small.size()) ==
        KINEX_ERR_BUFFER_TOO_SMALL);
  std::vector<double> p(225);
  REQUIRE(kinex_model_array_get(m.handle, KINEX_ARRAY_ENCOUNTER, p.data(), p.size()) == KINEX_OK);
  CHECK(p[1 * 15 + 1] == doctest::Approx(37.5 / 725.0));
  std::vector<double> c(15 * 15 * 15);
  REQUIRE(kinex_model_array_get(m.handle, KINEX_ARRAY_TRANSITION, c.data(), c.size()) == KINEX_OK);
  for (size_t h = 0; h < 15; ++h) {
    double col = 0.0;
    for (size_t i = 0; i < 15; ++i) col += c[(i * 15 + h) * 15 + 4];
    CHECK(std::abs(col - 1.0) <= 1e-12);
  }

  char hash[17];
  REQUIRE(kinex_model_hash(m.handle, hash, sizeof hash) == KINEX_OK);
  CHECK(std::strlen(hash) == 16);
  char tiny[4];
  CHECK(kinex_model_hash(m.handle, tiny, sizeof tiny) == KINEX_ERR_BUFFER_TOO_SMALL);
  Model same;
  char hash2[17];
  REQUIRE(kinex_model_hash(same.handle, hash2, sizeof hash2) == KINEX_OK);
  CHECK(std::string(hash) == std::string(hash2));

  std::vector<double> x(15, 1.0 / 15), d(15);
  REQUIRE(kinex_model_rhs(m.handle, x.data(), x.size(), d.data()) == KINEX_OK);
  double total = 0.0;
  for (double v : d) total += v;
  CHECK(std::abs(total) <= 1e-12);
  CHECK(kinex_model_rhs(m.handle, x.data(), 14, d.data()) == KINEX_ERR_INVALID_ARGUMENT);
  double t = 0.0;
  REQUIRE(kinex_model_indirect_variation(m.handle, x.data(), 15, 0, 3, 2, &t) == KINEX_OK);
  CHECK(t == 0.0);

  std::vector<double> off(15, 0.1);
  CHECK(kinex_model_check_state(m.handle, off.data(), off.size()) == KINEX_ERR_INVALID_ARGUMENT);
  CHECK(kinex_model_check_state(m.handle, x.data(), x.size()) == KINEX_OK);
}

TEST_CASE("model files") {
  Model m;
  const auto dir = scratch_dir();
  REQUIRE(kinex_model_write(m.handle, KINEX_FILE_ENCOUNTER, (dir / "p.csv").c_str()) == KINEX_OK);
  CHECK(first_line(dir / "p.csv").rfind("h,1,2", 0) == 0);
  REQUIRE(kinex_model_write(m.handle, KINEX_FILE_SCHEDULE, (dir / "s.csv").c_str()) == KINEX_OK);
  CHECK(first_line(dir / "s.csv") == "class,r_lower,r_upper,r_avg,tau,w");
  REQUIRE(kinex_model_write(m.handle, KINEX_FILE_TRANSITION, (dir / "c.csv").c_str()) == KINEX_OK);
  REQUIRE(kinex_model_write(m.handle, KINEX_FILE_RECORD, (dir / "m.txt").c_str()) == KINEX_OK);
  CHECK(kinex_model_write(m.handle, KINEX_FILE_RECORD, "/nonexistent/dir/m.txt") == KINEX_ERR_IO);
}

TEST_CASE("initial conditions and integration") {
  Model m;
  kinex_initial_spec spec;
  kinex_initial_spec_default(&spec);
  spec.kind = KINEX_IC_TWO_POINT;
  spec.class_a = 0;
  spec.class_b = 14;
  spec.has_target_mu = 1;
  spec.target_mu = 187.5;
  std::vector<double> x0(15);
  REQUIRE(kinex_initial_condition(m.handle, &spec, x0.data(), x0.size()) == KINEX_OK);
  CHECK(x0[0] == doctest::Approx(0.5));
  spec.target_mu = 400.0;
  CHECK(kinex_initial_condition(m.handle, &spec, x0.data(), x0.size()) == KINEX_ERR_INVALID_ARGUMENT);

  kinex_initial_spec low;
  kinex_initial_spec_default(&low);
  low.kind = KINEX_IC_LOW_MIDDLE;
  low.has_target_mu = 1;
  low.target_mu = 150.0;
  REQUIRE(kinex_initial_condition(m.handle, &low, x0.data(), x0.size()) == KINEX_OK);

  kinex_integration_settings s;
  kinex_integration_settings_default(&s);
  const auto dir = scratch_dir();
  kinex_equilibrium* eq = nullptr;
  callback_calls = 0;
  REQUIRE(kinex_integrate(m.handle, x0.data(), 15, &s, 5000, count_calls, nullptr, (dir / "traj.csv").c_str(),
                          &eq) == KINEX_OK);
  CHECK(callback_calls >= 3);
  kinex_equilibrium_info info;
  REQUIRE(kinex_equilibrium_info_get(eq, &info) == KINEX_OK);
  CHECK(info.converged == 1);
  CHECK(std::abs(info.mu - 150.0) <= 1e-9);
  CHECK(info.residual < s.convergence_tol);
  CHECK(info.rate_fit_r2 > 0.99);
  CHECK(first_line(dir / "traj.csv").rfind("t,", 0) == 0);
  REQUIRE(kinex_equilibrium_write(m.handle, eq, (dir / "eq.txt").c_str()) == KINEX_OK);
  kinex_equilibrium_destroy(eq);

  kinex_integration_settings brief = s;
  brief.max_time = 10.0;
  eq = nullptr;
  CHECK(kinex_integrate(m.handle, x0.data(), 15, &brief, 0, nullptr, nullptr, nullptr, &eq) ==
        KINEX_ERR_NON_CONVERGENCE);
  REQUIRE(eq != nullptr);
  REQUIRE(kinex_equilibrium_info_get(eq, &info) == KINEX_OK);
  CHECK(info.converged == 0);
  CHECK(info.residual > 0.0);
  kinex_equilibrium_destroy(eq);

  eq = nullptr;
  CHECK(kinex_solve_equilibrium(m.handle, 380.0, &s, &eq) == KINEX_ERR_INVALID_ARGUMENT);
  CHECK(eq == nullptr);
}

TEST_CASE("indicators, mobility and deltas") {
  Model a;
  kinex_model_config cfg_b;
  kinex_model_config_default(&cfg_b);
  cfg_b.tau_max = 0.60;
  Model b(cfg_b);
  const auto xa = equilibrium_state(a, 143.5);
  const auto xb = equilibrium_state(b, 143.5);

  kinex_indicators ind;
  REQUIRE(kinex_indicators_eval(a.handle, xa.data(), 15, &ind) == KINEX_OK);
  CHECK(ind.mu == doctest::Approx(143.5));
  CHECK(ind.gini > 0.3);
  CHECK(ind.mobility == doctest::Approx(ind.exchange_collective + ind.welfare_collective));

  std::vector<double> cls(13);
  REQUIRE(kinex_mobility_profile(a.handle, xa.data(), 15, KINEX_MOB_CLASS, cls.data(), cls.size()) == KINEX_OK);
  double sum = 0.0;
  for (double v : cls) sum += v;
  CHECK(std::abs(sum - ind.mobility) <= 1e-14);

  const auto dir = scratch_dir();
  kinex_delta_summary delta;
  REQUIRE(kinex_mobility_delta(a.handle, xa.data(), b.handle, xb.data(), 15, (dir / "delta.csv").c_str(),
                               &delta) == KINEX_OK);
  CHECK(delta.mobility > 0.0);
  CHECK(delta.gini < 0.0);
  for (auto f : {KINEX_FILE_INDICATORS, KINEX_FILE_INDICATOR_RECORD, KINEX_FILE_LORENZ, KINEX_FILE_MOBILITY}) {
    CHECK(kinex_indicators_write(a.handle, xa.data(), 15, f, (dir / "ind.out").c_str()) == KINEX_OK);
  }

  kinex_model_config cfg_n;
  kinex_model_config_default(&cfg_n);
  cfg_n.n = 14;
  Model other(cfg_n);
  std::vector<double> xo(14, 1.0 / 14);
  CHECK(kinex_mobility_delta(a.handle, xa.data(), other.handle, xo.data(), 15, nullptr, &delta) ==
        KINEX_ERR_INVALID_ARGUMENT);
}

TEST_CASE("calibration failure and sweep handles") {
  kinex_model_config base;
  kinex_model_config_default(&base);
  kinex_calibration cal;
  kinex_calibration_default(&cal);
  cal.target_gini = 0.9;
  cal.mu_lo = 130.0;
  cal.mu_hi = 160.0;
  kinex_integration_settings s;
  kinex_integration_settings_default(&s);
  kinex_calibration_result res;
  CHECK(kinex_calibrate_mu(&base, &cal, &s, &res) == KINEX_ERR_CALIBRATION);
  CHECK(res.gini_at_lo > res.gini_at_hi);

  const double dts[] = {0.15, 0.25};
  const double gammas[] = {0.2, 0.4};
  kinex_sweep* sweep = nullptr;
  REQUIRE(kinex_sweep_run(&base, dts, 2, gammas, 2, 143.5, 0.375, &s, 2, &sweep) == KINEX_OK);
  CHECK(kinex_sweep_size(sweep) == 4);
  kinex_sweep_cell cell;
  REQUIRE(kinex_sweep_cell_get(sweep, 3, &cell) == KINEX_OK);
  CHECK(cell.tau_min == doctest::Approx(0.25));
  CHECK(cell.gamma == 0.4);
  CHECK(cell.converged == 1);
  CHECK(std::string(kinex_sweep_cell_failure(sweep, 0)).empty());
  CHECK(kinex_sweep_cell_failure(sweep, 9) == nullptr);
  CHECK(kinex_sweep_cell_get(sweep, 4, &cell) == KINEX_ERR_INVALID_ARGUMENT);
  kinex_correlation corr;
  REQUIRE(kinex_sweep_correlation(sweep, &corr) == KINEX_OK);
  CHECK(corr.cells == 4);
  CHECK(corr.sign_checks == 4);
  CHECK(corr.pearson < 0.0);
  REQUIRE(kinex_sweep_write_csv(sweep, (scratch_dir() / "sweep.csv").c_str()) == KINEX_OK);
  kinex_sweep_destroy(sweep);

  sweep = nullptr;
  CHECK(kinex_sweep_run(&base, dts, 0, gammas, 2, 143.5, 0.375, &s, 1, &sweep) == KINEX_ERR_INVALID_ARGUMENT);
  CHECK(sweep == nullptr);
}

TEST_CASE("kappa functions and table") {
  double v = 0.0;
  REQUIRE(kinex_kappa_exp(-1.0, 0.5, &v) == KINEX_OK);
  CHECK(v == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
  REQUIRE(kinex_kappa_from_temperature(3.0, &v) == KINEX_OK);
  CHECK(v == doctest::Approx(0.5));
  REQUIRE(kinex_kappa_gini(1.0, 1e-6, nullptr, &v) == KINEX_OK);
  CHECK(std::abs(v - 0.5) <= 1e-3);
  CHECK(kinex_kappa_gini(0.5, 0.6, nullptr, &v) == KINEX_ERR_DIVERGENT_MEAN);
  REQUIRE(kinex_kappa_quantile(0.5, 1.0, 0.0, 1.0, &v) == KINEX_OK);
  CHECK(v == doctest::Approx(std::log(2.0)));

  const double alphas[] = {1.0};
  const double kappas[] = {0.5, 0.999};
  kinex_kappa_table* table = nullptr;
  REQUIRE(kinex_kappa_table_run(alphas, 1, kappas, 2, nullptr, 1, &table) == KINEX_OK);
  CHECK(kinex_kappa_table_size(table) == 2);
  kinex_kappa_row row;
  REQUIRE(kinex_kappa_table_row_get(table, 1, &row) == KINEX_OK);
  CHECK(row.flagged == 1);
  CHECK(std::isnan(row.gini));
  CHECK(std::strlen(kinex_kappa_table_note(table, 1)) > 0);
  REQUIRE(kinex_kappa_table_write_csv(table, (scratch_dir() / "kappa.csv").c_str()) == KINEX_OK);
  kinex_kappa_table_destroy(table);
  table = nullptr;
  CHECK(kinex_kappa_table_run(alphas, 0, kappas, 2, nullptr, 1, &table) == KINEX_ERR_INVALID_ARGUMENT);
}
