#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "denjoy/config.hpp"

namespace denjoy::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitPipeline = 2 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> records;  // one JSON object per line
  std::string summary;
  std::filesystem::path results_path;
  std::filesystem::path summary_path;
  std::vector<std::filesystem::path> artifacts;
};

// Runs the configured experiment and writes results.jsonl, summary.txt and
// any artifacts (plots, trace tables, ball-system and certificate records)
// to config.output_dir. Validation errors surface as ConfigError before
// anything is written.
RunOutcome run(const ExperimentConfig& config);

}  // namespace denjoy::cli
