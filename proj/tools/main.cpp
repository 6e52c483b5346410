#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kinex: kinetic exchange model of income classes with taxation and welfare"};
  app.require_subcommand(1);

  kinex_cli::Options opt;
  std::optional<long long> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--out-dir", opt.out_dir, "directory for output files")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = hardware concurrency")->capture_default_str();
    sub->add_option("--seed", seed, "reserved; the model is deterministic");
  };

  add_common(app.add_subcommand("simulate", "solve one equilibrium and write its indicators"));
  auto* compare = app.add_subcommand("compare", "compare two regimes on the same grid");
  add_common(compare);
  compare->add_option("--config-b", opt.config_b_path, "configuration of the second regime")->required();
  add_common(app.add_subcommand("sweep", "G, M and TR over a (delta_tau, gamma) grid"));
  add_common(app.add_subcommand("levelline", "trace level lines of G in the (delta_tau, gamma) plane"));
  add_common(app.add_subcommand("calibrate", "find the mean income matching a target Gini index"));
  add_common(app.add_subcommand("kappa", "Gini index of the kappa-generalized distribution"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kinex_cli::kExitConfig;
  }
  if (seed) {
    std::fprintf(stderr, "config error: --seed is reserved for stochastic extensions and must not be set\n");
    return kinex_cli::kExitConfig;
  }
  opt.command = app.get_subcommands().front()->get_name();
  return kinex_cli::run_command(opt);
}
