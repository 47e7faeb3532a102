#include "cli/run.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

namespace macfcs::cli {

namespace {

nlohmann::json split_json(const DfSplit& s) {
  return {{"alpha", s.alpha}, {"beta", s.beta}};
}

nlohmann::json params_json(const StrategyParams& params) {
  return std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DfSplit>) {
          return split_json(p);
        } else if constexpr (std::is_same_v<T, CfSplit>) {
          return {{"pu1", p.pu1}, {"pv1", p.pv1},         {"pu2", p.pu2},
                  {"pv2", p.pv2}, {"ntilde1", p.ntilde1}, {"ntilde2", p.ntilde2}};
        } else if constexpr (std::is_same_v<T, MacccPowers>) {
          return {{"p1", p.p1}, {"p2", p.p2}};
        } else {
          nlohmann::json phases = nlohmann::json::array();
          for (const auto& ph : p.mixture.components) {
            nlohmann::json j = split_json(ph.split);
            j["weight"] = ph.weight;
            j["p1"] = ph.p1;
            j["p2"] = ph.p2;
            phases.push_back(std::move(j));
          }
          return {{"phases", std::move(phases)},
                  {"destination_decodes_all_phases", p.destination_decodes_all_phases}};
        }
      },
      params);
}

std::string name(Strategy s) { return std::string(to_string(s)); }

RunResult run_evaluate(const RunConfig& c) {
  const std::array<double, 2> limits{c.topology.power_limit(0), c.topology.power_limit(1)};
  const StrategyPoint point = c.params ? StrategyPoint{c.strategy, limits, *c.params}
                                       : best_split(c.strategy, c.topology, c.triple, limits,
                                                    c.search);
  const ConstraintReport report = evaluate(c.topology, c.triple, point);
  RunResult r{kExitOk, CsvSchema::kEvaluate, {}};
  const int prec = c.output.precision;
  for (const auto& e : report.entries) {
    r.rows.push_back({e.label, format_number(e.lhs, prec), format_number(e.rhs, prec),
                      format_number(e.slack(), prec), e.satisfied() ? "true" : "false"});
  }
  if (!report.feasible()) r.exit_code = kExitInfeasible;
  return r;
}

RunResult run_min_power(const RunConfig& c) {
  RunResult r{kExitOk, CsvSchema::kMinPower, {}};
  const std::string objective(to_string(c.command.objective));
  try {
    const auto res = min_power(c.strategy, c.topology, c.triple, c.command.objective, c.search);
    r.rows.push_back({name(c.strategy), objective, format_number(res.p_star, c.output.precision),
                      witness_json(res.witness)});
  } catch (const CapExceeded&) {
    r.rows.push_back({name(c.strategy), objective, "inf", "{}"});
    r.exit_code = kExitInfeasible;
  }
  return r;
}

RunResult run_sweep(const RunConfig& c) {
  RunResult r{kExitOk, CsvSchema::kSweep, {}};
  const auto rows = sweep(c.command.strategies, c.topology, c.command.parameter, c.command.values,
                          c.triple, c.command.objective, c.search);
  const int prec = c.output.precision;
  for (const auto& row : rows) {
    if (!row.result) r.exit_code = kExitInfeasible;
    r.rows.push_back({format_number(row.value, prec), name(row.strategy),
                      row.result ? format_number(*row.result, prec) : "inf",
                      row.witness ? witness_json(*row.witness) : "{}"});
  }
  return r;
}

RunResult run_region(const RunConfig& c) {
  RunResult r{kExitOk, CsvSchema::kRegion, {}};
  const std::array<double, 2> limits{c.topology.power_limit(0), c.topology.power_limit(1)};
  const auto res = region(c.strategy, c.topology, limits, c.command.resolution, c.search);
  const int prec = c.output.precision;
  for (const auto& p : res.points) {
    r.rows.push_back(
        {name(p.strategy), "raw", format_number(p.r1, prec), format_number(p.r2, prec)});
  }
  for (const auto& h : res.hull) {
    r.rows.push_back(
        {name(c.strategy), "hull", format_number(h[0], prec), format_number(h[1], prec)});
  }
  return r;
}

RunResult run_cf_min_noise(const RunConfig& c) {
  RunResult r{kExitOk, CsvSchema::kCfMinNoise, {}};
  const auto& o = c.command;
  const auto res = cf_min_noise(c.topology, o.pu1, o.pv1, o.pu2, o.pv2, o.tol);
  const int prec = c.output.precision;
  r.rows.push_back({format_number(o.pu1, prec), format_number(o.pv1, prec),
                    format_number(o.pu2, prec), format_number(o.pv2, prec),
                    res ? format_number(res->first, prec) : "inf"});
  if (!res) r.exit_code = kExitInfeasible;
  return r;
}

}  // namespace

std::string witness_json(const StrategyPoint& point) {
  const nlohmann::json j{{"strategy", name(point.strategy)},
                         {"budget", point.budget},
                         {"params", params_json(point.params)}};
  return j.dump();
}

RunResult execute(const RunConfig& config) {
  switch (config.command.command) {
    case Command::kEvaluate: return run_evaluate(config);
    case Command::kMinPower: return run_min_power(config);
    case Command::kSweep: return run_sweep(config);
    case Command::kRegion: return run_region(config);
    case Command::kCfMinNoise: return run_cf_min_noise(config);
  }
  throw InvalidArgument("unknown command");
}

std::string manifest_path(const std::string& csv_path) { return csv_path + ".manifest.yaml"; }

int run(const RunConfig& config, std::ostream* log) {
  const RunResult result = execute(config);
  emit_csv(result.rows, result.schema, config.output.path);

  const std::string mpath = manifest_path(config.output.path);
  std::ofstream m(mpath, std::ios::binary | std::ios::trunc);
  if (!m) throw Error("cannot open '" + mpath + "' for writing");
  m << to_manifest(config);
  if (!m) throw Error("failed writing '" + mpath + "'");

  if (log) {
    *log << fmt::format("{}: {} rows -> {}\n", to_string(config.command.command),
                        result.rows.size(), config.output.path);
    if (result.exit_code == kExitInfeasible) *log << "result: infeasible\n";
  }
  return result.exit_code;
}

}  // namespace macfcs::cli
