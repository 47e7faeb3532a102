#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "cli/run.hpp"

using namespace macfcs;
using namespace macfcs::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("macfcs_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const std::string kTopology = R"(topology:
  distances: [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
  power_limits: [10, 10]
)";

const std::string kHalf = R"(sources:
  triple: {h1_given_2: 0.5, h2_given_1: 0.5, common: 0.5}
)";

std::string config(const std::string& strategy, const std::string& command,
                   const std::string& out) {
  return kTopology + kHalf + "strategy:\n" + strategy + "command:\n" + command +
         "output:\n  path: " + (scratch() / out).string() + "\n";
}

// Line and key of the ConfigError raised by parsing `text`.
std::pair<int, std::string> config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return {e.line(), e.key()};
  }
  return {-1, ""};
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MACFCS_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
    } else {
      field += c;
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("minimal config and documented defaults") {
  const auto c = parse_config(config("  name: maccc\n", "  name: evaluate\n", "a.csv"));
  CHECK(c.topology.kappa() == kDefaultKappa);
  CHECK(c.topology.eta() == kDefaultEta);
  CHECK(c.topology.noise(2) == kDefaultNoise);
  CHECK(c.strategy == Strategy::kMaccc);
  CHECK_FALSE(c.params.has_value());
  CHECK(c.command.command == Command::kEvaluate);
  CHECK(c.output.precision == 9);
  CHECK(c.search.rng_seed == SearchConfig{}.rng_seed);
}

TEST_CASE("coordinates and pmf inputs") {
  const auto c = parse_config(R"(topology:
  coordinates: [[0, 0], [3, 0], [0, 4]]
  kappa: 2
  eta: 3
  noise: 0.5
  power_limits: [1, 2]
sources:
  pmf: [[0.5, 0], [0, 0.5]]
strategy: {name: df, params: search}
command: {name: min-power, objective: sum}
)");
  CHECK(c.topology.distance(1, 2) == 5.0);
  CHECK(c.topology.kappa() == 2.0);
  CHECK(c.topology.noise(1) == 0.5);
  CHECK(c.triple.common == doctest::Approx(1.0));
  CHECK(c.command.objective == PowerObjective::kSum);
}

TEST_CASE("fixed strategy parameters") {
  const auto df = parse_config(config("  name: df\n  params: {alpha: [1, 0, 0, 0], beta: [0.5, 0, 0, 0.5]}\n",
                                      "  name: evaluate\n", "b.csv"));
  REQUIRE(df.params.has_value());
  CHECK(std::get<DfSplit>(*df.params).beta[3] == 0.5);

  const auto tdma = parse_config(config(R"(  name: tdma_df
  params:
    destination_decodes_all_phases: false
    phases:
      - {weight: 0.25, p1: 10, alpha: [0, 0, 0, 1]}
      - {weight: 0.25, p2: 10, beta: [0, 0, 0, 1]}
      - {weight: 0.5, p1: 10, p2: 10, alpha: [1, 0, 0, 0], beta: [1, 0, 0, 0]}
)", "  name: evaluate\n", "c.csv"));
  const auto& s = std::get<TdmaSchedule>(*tdma.params);
  CHECK_FALSE(s.destination_decodes_all_phases);
  CHECK(s.mixture.components.size() == 3);
}

TEST_CASE("validation errors name the key and line") {
  auto e = config_error(R"(topology:
  distances: [[0, 1, 1], [1, 0, 1],
              [1, 0, 0]]
  power_limits: [1, 1]
)");
  CHECK(e.first == 3);
  CHECK(e.second == "topology.distances[2][1]");

  e = config_error("topology:\n  distances: [[0,1,1],[1,0,1],[1,1,0]]\n  eta: 0\n  power_limits: [1,1]\n");
  CHECK(e.first == 3);
  CHECK(e.second == "topology.eta");

  e = config_error(kTopology + "sources:\n  triple:\n    h1_given_2: 0.5\n    h2_given_1: -0.1\n    common: 0\n");
  CHECK(e.first == 7);
  CHECK(e.second == "sources.triple.h2_given_1");

  e = config_error(kTopology + "sources:\n  pmf: [[0.5, 0.4]]\n");
  CHECK(e.first == 5);
  CHECK(e.second == "sources.pmf");

  e = config_error(config(R"(  name: tdma_df
  params:
    phases:
      - {weight: 0.3, p1: 1, alpha: [0, 0, 0, 1]}
      - {weight: 0.3, p2: 1, beta: [0, 0, 0, 1]}
      - {weight: 0.3, alpha: [1, 0, 0, 0]}
)", "  name: evaluate\n", "d.csv"));
  CHECK(e.first == 9);
  CHECK(e.second == "strategy.params.phases");

  e = config_error(config("  name: maccc\n", "  name: evaluate\n  colour: red\n", "e.csv"));
  CHECK(e.first == 10);
  CHECK(e.second == "command.colour");

  e = config_error(kTopology + kHalf + "strategy: {name: maccc}\n");
  CHECK(e.second == "command");

  e = config_error(config("  name: af\n", "  name: evaluate\n", "f.csv"));
  CHECK(e.second == "strategy.name");
  CHECK(e.first == 7);

  e = config_error("topology: [1, 2\n");
  CHECK(e.second == "<document>");

  e = config_error(config("  name: df\n  params: {alpha: [0.9, 0.9, 0, 0], beta: [0, 0, 0, 1]}\n",
                          "  name: evaluate\n", "g.csv"));
  CHECK(e.second == "strategy.params");
}

TEST_CASE("CSV writer") {
  CHECK(render_csv({}, CsvSchema::kEvaluate) == "label,lhs_bits,rhs_bits,slack_bits,feasible\n");
  CHECK(render_csv({}, CsvSchema::kSweep) == "swept_value,strategy,p_star,witness_params_json\n");
  CHECK(render_csv({}, CsvSchema::kMinPower) == "strategy,objective,p_star,witness_params_json\n");
  CHECK(render_csv({}, CsvSchema::kRegion) == "strategy,kind,r1_bits,r2_bits\n");
  CHECK(render_csv({}, CsvSchema::kCfMinNoise) == "pu1,pv1,pu2,pv2,ntilde_star\n");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("plain") == "plain");
  CHECK(format_number(1.0 / 3.0, 9) == "0.333333333");
  CHECK(format_number(1.0 / 3.0, 3) == "0.333");
  CHECK(format_number(INFINITY, 9) == "inf");
  CHECK(format_number(-0.0, 9) == "0");
  CHECK_THROWS_AS(render_csv({{"x"}}, CsvSchema::kRegion), InvalidArgument);

  const auto p = scratch() / "empty.csv";
  emit_csv({}, CsvSchema::kEvaluate, p.string());
  CHECK(slurp(p) == "label,lhs_bits,rhs_bits,slack_bits,feasible\n");
  CHECK_THROWS_AS(emit_csv({}, CsvSchema::kEvaluate, (scratch() / "no/such/dir.csv").string()),
                  Error);
}

TEST_CASE("run: MAC minimum power") {
  const auto c = parse_config(config("  name: maccc\n", "  name: min-power\n", "mp.csv"));
  CHECK(run(c) == kExitOk);
  const auto rows = parse_csv(slurp(c.output.path));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "maccc");
  CHECK(rows[1][1] == "symmetric");
  CHECK(std::abs(std::stod(rows[1][2]) - 3.5) <= c.search.bisection_tol);
  CHECK(rows[1][3].find("\"strategy\":\"maccc\"") != std::string::npos);
  CHECK(fs::exists(manifest_path(c.output.path)));
}

TEST_CASE("run: evaluate with zero power") {
  auto text = config("  name: df\n", "  name: evaluate\n", "zero.csv");
  text.replace(text.find("[10, 10]"), 8, "[0, 0]");
  const auto c = parse_config(text);
  CHECK(run(c) == kExitInfeasible);
  const auto rows = parse_csv(slurp(c.output.path));
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][4] == "false");
}

TEST_CASE("run: compressed-carrier sweep gives a decreasing noise column") {
  const auto c = parse_config(config("  name: cf\n",
                                     "  name: sweep\n  parameter: pu_fraction\n"
                                     "  values: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]\n",
                                     "pu.csv"));
  CHECK(run(c) == kExitOk);
  const auto rows = parse_csv(slurp(c.output.path));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == std::vector<std::string>{"swept_value", "strategy", "p_star", "witness_params_json"});
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) < std::stod(rows[i - 1][2]));
}

TEST_CASE("run: cf-min-noise and region") {
  const auto c = parse_config(config("  name: cf\n", "  name: cf-min-noise\n  pu1: 0\n  pv1: 10\n  pu2: 0\n  pv2: 10\n", "n.csv"));
  CHECK(run(c) == kExitInfeasible);
  CHECK(slurp(c.output.path) == "pu1,pv1,pu2,pv2,ntilde_star\n0,10,0,10,inf\n");

  const auto r = parse_config(config("  name: maccc\n", "  name: region\n  resolution: 4\n", "r.csv"));
  CHECK(run(r) == kExitOk);
  const auto rows = parse_csv(slurp(r.output.path));
  REQUIRE(rows.size() > 5);
  CHECK(rows[1][1] == "raw");
  CHECK(rows.back()[1] == "hull");
}

TEST_CASE("manifest round trip reproduces the CSV byte for byte") {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"  name: df\n", "  name: evaluate\n"},
      {"  name: df\n  params: {alpha: [0.5, 0.1, 0, 0.4], beta: [0.3, 0, 0.3, 0.4]}\n", "  name: evaluate\n"},
      {"  name: cf\n  params: {pu1: 1, pv1: 9, pu2: 2, pv2: 8, ntilde1: 0.1, ntilde2: 3}\n", "  name: evaluate\n"},
      {"  name: maccc\n", "  name: sweep\n  parameter: d12\n  values: [0.5, 2]\n  strategies: [maccc, df]\n"},
      {"  name: tdma_df\n", "  name: min-power\n"},
      {"  name: df\n", "  name: min-power\n  objective: sum\n"},
  };
  int k = 0;
  for (const auto& [strategy, command] : cases) {
    auto c = parse_config(config(strategy, command, "rt" + std::to_string(k) + ".csv"));
    c.search.multistarts = 4;
    run(c);
    const std::string first = slurp(c.output.path);
    auto again = parse_config(slurp(manifest_path(c.output.path)));
    CHECK(to_manifest(again) == to_manifest(c));
    again.output.path = (scratch() / ("rt" + std::to_string(k) + "_again.csv")).string();
    run(again);
    CHECK(slurp(again.output.path) == first);
    ++k;
  }
}

TEST_CASE("command-line binary: exit codes and overrides") {
  const auto good = scratch() / "good.yaml";
  write(good, config("  name: maccc\n", "  name: min-power\n", "bin.csv"));
  CHECK(run_binary("--config " + good.string() + " --quiet") == 0);
  CHECK(run_binary("--config " + good.string() + " --seed 7 --precision 3 --out " +
                   (scratch() / "bin2.csv").string()) == 0);
  const auto rows = parse_csv(slurp(scratch() / "bin2.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][2] == "3.5");
  CHECK(slurp(scratch() / "bin2.csv.manifest.yaml").find("seed: 7") != std::string::npos);

  const auto zero = scratch() / "zero.yaml";
  auto text = config("  name: maccc\n", "  name: evaluate\n", "bin3.csv");
  text.replace(text.find("[10, 10]"), 8, "[0, 0]");
  write(zero, text);
  CHECK(run_binary("--config " + zero.string()) == 2);

  const auto bad = scratch() / "bad.yaml";
  write(bad, "topology:\n  distances: [[0,1,1],[1,0,1],[1,1,0]]\n  eta: -1\n");
  CHECK(run_binary("--config " + bad.string()) == 1);
  CHECK(run_binary("--config " + (scratch() / "missing.yaml").string()) == 1);
  CHECK(run_binary("") != 0);
}
