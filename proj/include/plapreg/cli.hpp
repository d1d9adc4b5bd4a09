#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace plapreg {

/// Resolved command-line configuration. Values come from the JSON file
/// given with --config, overridden by explicit flags.
struct RunConfig {
  std::string command;
  std::optional<double> p;
  std::optional<double> eps;
  std::optional<double> s;
  std::optional<double> theta;
  std::optional<double> q;
  std::size_t nodes = 4097;
  int dim = 1;
  std::optional<double> delta;
  std::string oracle;
  std::string suite = "all";
  std::vector<double> lambdas{0.5, 2.0};
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
  std::string out = ".";
  std::string mode = "none";
  std::string input;
  std::string problem;
  int max_iter = 200;
};

nlohmann::json to_json(const RunConfig& config);

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitComputeFailure = 1, kExitUsage = 2 };

/// Runs the command line; never throws. Diagnostics go to `err`, progress
/// lines to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plapreg
