#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "kpplab/config.hpp"

namespace kpplab {

enum ExitCode : int { exit_pass = 0, exit_verdict_fail = 1, exit_schema = 2, exit_runtime = 3 };

struct RunOptions {
  unsigned jobs = 1;
  std::optional<std::string> output_dir;  // overrides output.directory
  std::optional<std::uint64_t> seed;      // overrides the config seed
  bool quiet = false;
  bool write_artifacts = true;
};

struct RunReport {
  std::string experiment;
  bool passed = false;     // the raw verdict of the experiment's checks
  std::string verdict;     // "pass", "fail", "expected-fail: confirmed", ...
  nlohmann::json summary;
  std::filesystem::path directory;
  int exit_code = exit_verdict_fail;
};

// Runs the configured experiment and writes its artifacts (summary.json,
// manifest.json, per-cell CSVs). Exit code 0 iff the verdict is "pass".
RunReport run_experiment(const RunConfig& cfg, const RunOptions& options, std::ostream& log);

// Theoretical speed along the configured direction.
SpeedResult configured_speed(const RunConfig& cfg);

// Closed-form dispersion curve over (0, mu_max] as CSV.
std::string configured_dispersion_csv(const RunConfig& cfg);

}  // namespace kpplab
