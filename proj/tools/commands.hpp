#pragma once

#include <string>
#include <vector>

#include "chsbs/chsbs.h"
#include "result_table.hpp"
#include "run_config.hpp"

namespace chsbs_cli {

enum ExitCode { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitNumerical = 3 };

struct CommandOptions {
  int jobs = 1;
  bool strict = false;        // fit rejections become failures
  bool inject_fault = false;  // corrupt one hierarchy coefficient (negative control)
};

struct CommandResult {
  ResultTable table;
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
};

// Library context configured from a RunConfig. Throws ConfigError naming the rejected setting.
class Context {
 public:
  Context(const RunConfig& cfg, const CommandOptions& opts);
  ~Context();
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  const chsbs_context* get() const { return ctx_; }

 private:
  void set(const char* key, chsbs_status s);
  chsbs_context* ctx_ = nullptr;
};

const std::vector<std::string>& command_names();

// Runs one subcommand. Throws ConfigError for settings the library rejects.
CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opts);

}  // namespace chsbs_cli
