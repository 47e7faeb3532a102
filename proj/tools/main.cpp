#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/run.hpp"
#include "macfcs/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Power and feasibility analysis for correlated sources over a cooperative MAC",
               "macfcs"};
  app.set_version_flag("--version", std::string(macfcs::kVersion));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> precision;
  bool quiet = false;
  app.add_option("--config", config_path, "YAML run configuration")->required();
  app.add_option("--seed", seed, "Override search.rng_seed");
  app.add_option("--out", out, "Override output.path");
  app.add_option("--precision", precision, "Override output.precision")
      ->check(CLI::Range(1, 17));
  app.add_flag("--quiet", quiet, "Suppress progress output");
  CLI11_PARSE(app, argc, argv);

  try {
    auto config = macfcs::cli::load_config(config_path);
    if (seed) config.search.rng_seed = *seed;
    if (out) config.output.path = *out;
    if (precision) config.output.precision = *precision;
    return macfcs::cli::run(config, quiet ? nullptr : &std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return macfcs::cli::kExitError;
  }
}
