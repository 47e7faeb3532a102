#pragma once

// Run configuration for the command-line front end. The on-disk format is
// YAML; see README.md for the schema.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "macfcs/errors.hpp"
#include "macfcs/model.hpp"
#include "macfcs/optimizer.hpp"
#include "macfcs/strategies.hpp"

namespace macfcs::cli {

// Parse or validation failure; the message names the offending key and the
// 1-based line it was found on.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class Command { kEvaluate, kMinPower, kSweep, kRegion, kCfMinNoise };

std::string_view to_string(Command c);

struct CommandOptions {
  Command command = Command::kEvaluate;
  PowerObjective objective = PowerObjective::kSymmetric;  // min-power, sweep
  SweepParameter parameter = SweepParameter::kD12;        // sweep
  std::vector<double> values;                             // sweep
  std::vector<Strategy> strategies;                       // sweep
  int resolution = 16;                                    // region
  // cf-min-noise
  double pu1 = 0.0;
  double pv1 = 0.0;
  double pu2 = 0.0;
  double pv2 = 0.0;
  double tol = 1e-6;
};

struct OutputOptions {
  std::string path = "macfcs_out.csv";
  int precision = 9;
};

struct RunConfig {
  Topology topology;
  SourceTriple triple;
  Strategy strategy = Strategy::kMaccc;
  // Fixed strategy parameters; nullopt means "search".
  std::optional<StrategyParams> params;
  CommandOptions command;
  SearchConfig search;
  OutputOptions output;
};

// Defaults for keys the user leaves out. kappa, eta and the noise variances
// are modelling assumptions, not measured values.
inline constexpr double kDefaultKappa = 1.0;
inline constexpr double kDefaultEta = 2.0;
inline constexpr double kDefaultNoise = 1.0;

RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

// The fully resolved configuration, doubles written with round-trip
// precision; feeding it back to parse_config reproduces the run exactly.
std::string to_manifest(const RunConfig& config);

}  // namespace macfcs::cli
