#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsurf/config.hpp"

namespace fracsurf {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,
  exit_flagged = 2,
  exit_check_fail = 3,
  exit_inconclusive = 4,
};

enum class OutputFormat { json, csv, both };

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides spec.seed
  int threads = 0;                    // 0: all cores
  OutputFormat format = OutputFormat::both;
  std::vector<std::string> argv;  // recorded in the provenance sidecar
};

// Serialized results. json and csv depend only on the config, never on thread count or time.
struct RunOutput {
  std::string json;
  std::string csv;
  int exit_code = exit_ok;
};

RunOutput execute(const ExperimentConfig& cfg);

// Full invocation: reads the config, applies overrides, writes result.json / result.csv and
// provenance.json into out_dir, and returns the process exit code. Diagnostics go to stderr.
int run(const RunOptions& opt);

}  // namespace fracsurf
