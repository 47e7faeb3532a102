#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/csv.hpp"

namespace macfcs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

struct RunResult {
  int exit_code = kExitOk;
  CsvSchema schema = CsvSchema::kEvaluate;
  std::vector<CsvRow> rows;
};

// Strategy point as a JSON object: strategy name, per-node budget and the
// strategy parameters.
std::string witness_json(const StrategyPoint& point);

// Executes the configured command without touching the file system.
RunResult execute(const RunConfig& config);

std::string manifest_path(const std::string& csv_path);

// Executes the command, writes the CSV and the run manifest next to it and
// returns the process exit status. Progress goes to `log` when non-null.
int run(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace macfcs::cli
