#include <CLI11.hpp>
#include <iostream>

#include "hjn/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hj-neumann: Hamilton-Jacobi equations with nonlinear Neumann and dynamical boundary conditions"};
  app.set_version_flag("--version", std::string("hj-neumann ") + hjn::kVersion);
  std::string config, out, command;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config, "experiment config (INI)")->required();
  app.add_option("--out", out, "output directory (overrides [run] out)");
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "log stages to stderr");
  app.add_option("command", command,
                 "evolve | ergodic | value | crosscheck | skorokhod | distance | aubry | asymptotic | "
                 "monotonicity | audit | report (overrides [run] command)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    hjn::ExperimentConfig cfg = hjn::load_config(config);
    if (!command.empty()) {
      // reuse the config validation for the command name
      cfg.command = hjn::parse_config("[run]\ncommand = " + command + "\n").command;
    }
    hjn::RunOptions opt;
    opt.out = out;
    opt.threads = threads;
    opt.verbose = verbose;
    opt.log = &std::cerr;
    hjn::RunManifest m = hjn::run(cfg, opt);
    if (verbose)
      for (const auto& [k, v] : m.results) std::cerr << k << " = " << v << "\n";
    if (m.acceptance_failed) {
      std::cerr << "acceptance: at least one criterion failed\n";
      return 4;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hjn::exit_code(e);
  }
}
