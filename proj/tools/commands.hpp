#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace capflow::cli {

struct Options {
  std::filesystem::path out_dir;  // empty: [output] directory, else "capflow_out"
  unsigned seed = 1;
  bool seed_given = false;
  int threads = 1;
};

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitVerdict = 2 };

int cmd_solve_radial(const RunConfig& cfg, const Options& opt, std::ostream& log);
int cmd_solve_grid(const RunConfig& cfg, const Options& opt, std::ostream& log);
int cmd_scan(const RunConfig& cfg, const Options& opt, std::ostream& log);
int cmd_penrose(const RunConfig& cfg, const Options& opt, std::ostream& log);
int cmd_identities(const RunConfig& cfg, const Options& opt, std::ostream& log);
int cmd_adm(const RunConfig& cfg, const Options& opt, std::ostream& log);

}  // namespace capflow::cli
