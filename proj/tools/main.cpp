#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chsbs/chsbs.h"
#include "commands.hpp"
#include "result_table.hpp"
#include "run_config.hpp"

using namespace chsbs_cli;

int main(int argc, char** argv) {
  CLI::App app{"Critical behaviour of cavity-coupled superconductors"};
  app.set_version_flag("--version", std::string(chsbs_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, convention, out_dir, format;
  std::vector<std::string> sets;
  bool strict = false, dump = false, inject = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("-c,--config", config_path, "config file (key = value lines, or JSON)");
  app.add_option("--convention", convention, "kernel convention: canonical | eq-bs-u-freq | subsec-tc");
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("-f,--format", format, "csv | json | plot-script");
  app.add_option("-s,--set", sets, "override one key, key=value (repeatable)");
  app.add_flag("--strict", strict, "treat rejected fits as failures");
  app.add_option("-j,--jobs", jobs, "worker threads (default: logical cores)")->check(CLI::Range(1, 256));
  app.add_flag("--dump-config", dump, "print the effective config and exit");
  app.add_flag("--inject-fault", inject)->group("");

  for (const auto& name : command_names()) {
    const char* help = name == "tc"          ? "critical temperature and mass slope per state"
                       : name == "exponents" ? "gamma and nu fits per state"
                       : name == "xi"        ? "correlation length and ratio to Fock(0)"
                       : name == "vertex"    ? "on-shell vertex against reduced temperature"
                       : name == "verify"    ? "built-in consistency checks"
                                             : "critical function M(T) on a grid";
    app.add_subcommand(name, help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError(kv, "expected key=value");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!convention.empty()) set_config_value(cfg, "kernel.convention", convention);
    if (!out_dir.empty()) set_config_value(cfg, "output.dir", out_dir);
    if (!format.empty()) set_config_value(cfg, "output.format", format);
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string config_text = to_config_text(cfg);
  if (dump) {
    std::cout << config_text;
    return kExitOk;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  CommandResult res;
  try {
    res = run_command(command, cfg, {jobs, strict, inject});
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  try {
    for (const auto& f : emit(res.table, cfg.output_format, cfg.output_dir, config_text))
      std::cout << cfg.output_dir << "/" << f << "\n";
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (res.exit_code == kExitNumerical) std::cerr << "numerical failure; see rows with an error note\n";
  if (res.exit_code == kExitVerifyFailed) std::cerr << "verification failed\n";
  return res.exit_code;
}
