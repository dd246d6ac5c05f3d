#include <iostream>

#include <CLI11.hpp>

#include "capflow/error.hpp"
#include "capflow/report.hpp"
#include "commands.hpp"

namespace {

using Command = int (*)(const capflow::cli::RunConfig&, const capflow::cli::Options&, std::ostream&);

struct Entry {
  const char* name;
  const char* help;
  Command run;
};

constexpr Entry kCommands[] = {
    {"solve-radial", "Solve the radial p-capacitary potential and write it as CSV",
     capflow::cli::cmd_solve_radial},
    {"solve-grid", "Solve the eps-regularized problem on a Cartesian grid",
     capflow::cli::cmd_solve_grid},
    {"scan", "Scan F_p, M_p, Q_p along the level-set flow", capflow::cli::cmd_scan},
    {"penrose", "Run the capacity chain towards the Penrose inequality",
     capflow::cli::cmd_penrose},
    {"identities", "Check the pointwise identities at sampled points",
     capflow::cli::cmd_identities},
    {"adm", "Estimate the ADM mass from coordinate-sphere integrals", capflow::cli::cmd_adm},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capflow: p-capacitary potentials and monotone quantities"};
  app.set_version_flag("--version", std::string(capflow::version_string()));
  app.require_subcommand(1);

  std::string config_path;
  capflow::cli::Options opt;
  std::string out_dir;
  for (const auto& e : kCommands) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    sub->add_option("--seed", opt.seed, "Seed for randomized sample points");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : capflow::cli::kExitError;
  }

  for (const auto& e : kCommands) {
    auto* sub = app.get_subcommand(e.name);
    if (!sub->parsed()) continue;
    opt.out_dir = out_dir;
    opt.seed_given = sub->count("--seed") > 0;
    if (opt.threads > 1) std::cerr << "note: commands run on one thread; --threads is accepted for compatibility\n";
    try {
      const auto cfg = capflow::cli::RunConfig::load(config_path);
      return e.run(cfg, opt, std::cout);
    } catch (const capflow::ParseError& ex) {
      std::cerr << "parse error: " << ex.what() << '\n';
    } catch (const capflow::ValidationError& ex) {
      std::cerr << "validation error: " << ex.what() << '\n';
    } catch (const std::exception& ex) {
      std::cerr << "error: " << ex.what() << '\n';
    }
    return capflow::cli::kExitError;
  }
  return capflow::cli::kExitError;
}
