#pragma once

#include <string>

namespace kinex_cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

struct Options {
  std::string command;
  std::string config_path;
  std::string config_b_path;  // compare only
  std::string out_dir = ".";
  unsigned threads = 1;
};

// Runs one subcommand, writes its manifest and returns the exit code.
int run_command(const Options& options);

}  // namespace kinex_cli
