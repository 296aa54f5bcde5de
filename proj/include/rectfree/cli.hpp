#pragma once

// Command implementations behind the rectfree executable. Each command returns
// its outputs in memory; run() writes them and maps outcomes to exit codes.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace rectfree::cli {

struct GridSpec {
  double xmin = 0.0;
  double xmax = 0.0;
  int npts = 0;

  std::vector<double> points() const;
};

/// "xmin:xmax:npts".
GridSpec parse_grid(const std::string& text);

struct RunConfig {
  std::string subcommand;
  double lambda = 0.5;
  std::vector<std::string> inputs;  // measure files
  int order = 8;
  std::optional<GridSpec> grid;
  int q1 = 150;
  int q2 = 300;
  int trials = 50;
  std::uint64_t seed = 42;
  std::string out;  // output JSON path; the CSV goes next to it (.csv). Empty: both to stdout.

  std::vector<double> moments;         // cumulants: moment list instead of a file
  std::string family;                  // density: catalog family
  std::map<std::string, double> params;  // density: family parameters (sigma2, t, alpha, scale, c)
  bool recover = false;                // density: recover even when a closed form is known
  int bins = 0;                        // mc: histogram bins
  std::string word;                    // trace: word such as "M1* M2 M1* M2"

  void validate() const;
};

nlohmann::json config_json(const RunConfig& config);

struct CommandResult {
  nlohmann::json json;
  std::optional<std::string> csv;
  bool ok = true;        // false: a requested computation failed or was flagged
  std::string message;   // diagnostics for stderr
};

CommandResult cmd_convolve(const RunConfig& config);
CommandResult cmd_moments(const RunConfig& config);
CommandResult cmd_cumulants(const RunConfig& config);
CommandResult cmd_density(const RunConfig& config);
CommandResult cmd_catalog(const RunConfig& config);
CommandResult cmd_mc(const RunConfig& config);
CommandResult cmd_trace(const RunConfig& config);

CommandResult dispatch(const RunConfig& config);

/// Runs the command and writes its outputs (JSON with the embedded config,
/// CSV with the config as a leading comment). Returns the process exit code:
/// 0 on success, 1 on failure or flagged results, 2 on invalid input.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rectfree::cli
