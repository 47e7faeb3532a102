#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "macfcs/version.hpp"

namespace macfcs::cli {

namespace {

int line_of(const YAML::Node& n, int fallback) {
  if (!n.IsDefined()) return fallback;
  const auto m = n.Mark();
  return m.is_null() ? fallback : m.line + 1;
}

// A YAML node together with its dotted key path and line, so that every
// error can say where it came from.
class Field {
 public:
  Field(YAML::Node node, std::string path, int line)
      : node_(std::move(node)), path_(std::move(path)), line_(line_of(node_, line)) {}

  bool present() const { return node_.IsDefined() && !node_.IsNull(); }
  const std::string& path() const { return path_; }
  int line() const { return line_; }
  const YAML::Node& node() const { return node_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, line_, what); }

  Field operator[](const std::string& key) const {
    if (present() && !node_.IsMap()) fail("expected a mapping");
    int line = line_;
    YAML::Node child;
    if (present()) {
      for (const auto& kv : node_) {
        if (kv.first.as<std::string>() == key) {
          line = line_of(kv.first, line_);
          child = kv.second;
        }
      }
    }
    Field f(child, path_.empty() ? key : path_ + "." + key, line);
    f.line_ = line;
    return f;
  }

  Field at(std::size_t i) const {
    return Field(node_[i], path_ + "[" + std::to_string(i) + "]", line_);
  }

  void require() const {
    if (!present()) fail("required key is missing");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    if (!present()) return;
    if (!node_.IsMap()) fail("expected a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!allowed.count(k)) {
        Field(kv.first, path_.empty() ? k : path_ + "." + k, line_).fail("unknown key");
      }
    }
  }

  double as_double() const {
    require();
    try {
      const double v = node_.as<double>();
      if (!std::isfinite(v)) fail("must be a finite number");
      return v;
    } catch (const YAML::Exception&) {
      fail("expected a number");
    }
  }

  double as_double(double fallback) const { return present() ? as_double() : fallback; }

  long long as_int() const {
    require();
    try {
      return node_.as<long long>();
    } catch (const YAML::Exception&) {
      fail("expected an integer");
    }
  }

  long long as_int(long long fallback) const { return present() ? as_int() : fallback; }

  std::string as_string() const {
    require();
    if (!node_.IsScalar()) fail("expected a string");
    return node_.as<std::string>();
  }

  std::string as_string(const std::string& fallback) const {
    return present() ? as_string() : fallback;
  }

  bool as_bool(bool fallback) const {
    if (!present()) return fallback;
    try {
      return node_.as<bool>();
    } catch (const YAML::Exception&) {
      fail("expected true or false");
    }
  }

  std::size_t size() const {
    require();
    if (!node_.IsSequence()) fail("expected a list");
    return node_.size();
  }

  std::vector<double> as_doubles() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_double());
    return out;
  }

  std::vector<std::vector<double>> as_matrix() const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).as_doubles());
    return out;
  }

  template <typename F>
  auto wrap(F&& f) const {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  int line_;
};

std::array<double, 4> four(const Field& f) {
  const auto v = f.as_doubles();
  if (v.size() != 4) f.fail("expected 4 power fractions (W0, W1, W2, fresh)");
  return {v[0], v[1], v[2], v[3]};
}

Topology parse_topology(const Field& t) {
  t.require();
  t.allow_only({"distances", "coordinates", "kappa", "eta", "noise", "power_limits"});
  const double kappa = t["kappa"].as_double(kDefaultKappa);
  if (kappa <= 0.0) t["kappa"].fail("must be positive");
  const double eta = t["eta"].as_double(kDefaultEta);
  if (eta <= 0.0) t["eta"].fail("must be positive");

  const Field dist = t["distances"];
  const Field coords = t["coordinates"];
  if (dist.present() == coords.present()) {
    t.fail("give exactly one of 'distances' or 'coordinates'");
  }
  std::vector<std::vector<double>> d;
  if (dist.present()) {
    d = dist.as_matrix();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i].size() != d.size()) dist.at(i).fail("distance matrix must be square");
      for (std::size_t j = 0; j < d[i].size(); ++j) {
        if (i != j && d[i][j] <= 0.0) dist.at(i).at(j).fail("distances must be positive");
      }
    }
  } else {
    std::vector<std::array<double, 2>> pos;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto p = coords.at(i).as_doubles();
      if (p.size() != 2) coords.at(i).fail("expected [x, y]");
      pos.push_back({p[0], p[1]});
    }
    d = coords.wrap([&] {
      return Topology::from_coordinates(pos, kappa, eta, std::vector<double>(pos.size(), 1.0),
                                        std::vector<double>(pos.size() > 0 ? pos.size() - 1 : 0, 0.0))
          .distances();
    });
  }
  const std::size_t n = d.size();

  std::vector<double> noise(n, kDefaultNoise);
  const Field nf = t["noise"];
  if (nf.present()) {
    noise = nf.node().IsSequence() ? nf.as_doubles() : std::vector<double>(n, nf.as_double());
    for (double v : noise) {
      if (v <= 0.0) nf.fail("noise variances must be positive");
    }
  }
  const Field pl = t["power_limits"];
  const auto limits = pl.as_doubles();
  for (double p : limits) {
    if (p < 0.0) pl.fail("power limits must be nonnegative");
  }
  return t.wrap([&] { return Topology(d, kappa, eta, noise, limits); });
}

SourceTriple parse_sources(const Field& s) {
  s.require();
  s.allow_only({"triple", "pmf"});
  const Field tf = s["triple"];
  const Field pf = s["pmf"];
  if (tf.present() == pf.present()) s.fail("give exactly one of 'triple' or 'pmf'");
  if (tf.present()) {
    tf.allow_only({"h1_given_2", "h2_given_1", "common"});
    SourceTriple t;
    auto entropy = [&](const char* key) {
      const double v = tf[key].as_double();
      if (v < 0.0) tf[key].fail("entropies must be nonnegative");
      return v;
    };
    t.h1_given_2 = entropy("h1_given_2");
    t.h2_given_1 = entropy("h2_given_1");
    t.common = entropy("common");
    return t;
  }
  return pf.wrap([&] { return triple_from_pmf(JointPMF{pf.as_matrix()}); });
}

TdmaSchedule parse_tdma(const Field& p) {
  p.allow_only({"phases", "destination_decodes_all_phases"});
  const Field phases = p["phases"];
  TdmaSchedule s;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Field ph = phases.at(i);
    ph.allow_only({"weight", "p1", "p2", "alpha", "beta"});
    TdmaPhase c;
    c.weight = ph["weight"].as_double();
    c.p1 = ph["p1"].as_double(0.0);
    c.p2 = ph["p2"].as_double(0.0);
    if (ph["alpha"].present()) c.split.alpha = four(ph["alpha"]);
    if (ph["beta"].present()) c.split.beta = four(ph["beta"]);
    weight_sum += c.weight;
    s.mixture.components.push_back(c);
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) phases.fail("phase weights must sum to 1");
  s.destination_decodes_all_phases = p["destination_decodes_all_phases"].as_bool(true);
  return s;
}

std::optional<StrategyParams> parse_params(Strategy strategy, const Field& p) {
  if (!p.present()) return std::nullopt;
  if (p.node().IsScalar()) {
    if (p.as_string() != "search") p.fail("expected 'search' or a mapping of fixed parameters");
    return std::nullopt;
  }
  switch (strategy) {
    case Strategy::kDecodeForward: {
      p.allow_only({"alpha", "beta"});
      return DfSplit{four(p["alpha"]), four(p["beta"])};
    }
    case Strategy::kCompressForward: {
      p.allow_only({"pu1", "pv1", "pu2", "pv2", "ntilde1", "ntilde2"});
      return CfSplit{p["pu1"].as_double(),     p["pv1"].as_double(),
                     p["pu2"].as_double(),     p["pv2"].as_double(),
                     p["ntilde1"].as_double(), p["ntilde2"].as_double()};
    }
    case Strategy::kMaccc: {
      p.allow_only({"p1", "p2"});
      return MacccPowers{p["p1"].as_double(), p["p2"].as_double()};
    }
    case Strategy::kTdmaDecodeForward: return parse_tdma(p);
  }
  return std::nullopt;
}

Command parse_command_name(const Field& f) {
  const auto name = f.as_string();
  if (name == "evaluate") return Command::kEvaluate;
  if (name == "min-power") return Command::kMinPower;
  if (name == "sweep") return Command::kSweep;
  if (name == "region") return Command::kRegion;
  if (name == "cf-min-noise") return Command::kCfMinNoise;
  f.fail("unknown command (expected evaluate, min-power, sweep, region or cf-min-noise)");
}

CommandOptions parse_command(const Field& c, Strategy strategy) {
  c.require();
  c.allow_only({"name", "objective", "parameter", "values", "strategies", "resolution", "pu1",
                "pv1", "pu2", "pv2", "tol"});
  CommandOptions o;
  o.command = parse_command_name(c["name"]);
  if (c["objective"].present()) {
    o.objective = c["objective"].wrap([&] { return parse_objective(c["objective"].as_string()); });
  }
  switch (o.command) {
    case Command::kSweep: {
      o.parameter =
          c["parameter"].wrap([&] { return parse_sweep_parameter(c["parameter"].as_string()); });
      o.values = c["values"].as_doubles();
      const Field sf = c["strategies"];
      if (sf.present()) {
        for (std::size_t i = 0; i < sf.size(); ++i) {
          o.strategies.push_back(sf.at(i).wrap([&] { return parse_strategy(sf.at(i).as_string()); }));
        }
      } else {
        o.strategies = {strategy};
      }
      if (o.strategies.empty()) sf.fail("list at least one strategy");
      break;
    }
    case Command::kRegion: {
      o.resolution = static_cast<int>(c["resolution"].as_int(16));
      if (o.resolution < 2) c["resolution"].fail("must be at least 2");
      break;
    }
    case Command::kCfMinNoise: {
      o.pu1 = c["pu1"].as_double();
      o.pv1 = c["pv1"].as_double();
      o.pu2 = c["pu2"].as_double();
      o.pv2 = c["pv2"].as_double();
      o.tol = c["tol"].as_double(1e-6);
      if (o.tol <= 0.0) c["tol"].fail("must be positive");
      break;
    }
    default: break;
  }
  return o;
}

SearchConfig parse_search(const Field& s) {
  s.allow_only({"multistarts", "grid_resolution", "rng_seed", "refine_iterations",
                "bisection_tol", "power_cap"});
  SearchConfig c;
  c.multistarts = static_cast<int>(s["multistarts"].as_int(c.multistarts));
  c.grid_resolution = static_cast<int>(s["grid_resolution"].as_int(c.grid_resolution));
  const long long seed = s["rng_seed"].as_int(static_cast<long long>(c.rng_seed));
  if (seed < 0) s["rng_seed"].fail("must be nonnegative");
  c.rng_seed = static_cast<std::uint64_t>(seed);
  c.refine_iterations = static_cast<int>(s["refine_iterations"].as_int(c.refine_iterations));
  c.bisection_tol = s["bisection_tol"].as_double(c.bisection_tol);
  c.power_cap = s["power_cap"].as_double(c.power_cap);
  s.wrap([&] {
    c.validate();
    return 0;
  });
  return c;
}

OutputOptions parse_output(const Field& o) {
  o.allow_only({"path", "precision"});
  OutputOptions out;
  out.path = o["path"].as_string(out.path);
  out.precision = static_cast<int>(o["precision"].as_int(out.precision));
  if (out.precision < 1 || out.precision > 17) o["precision"].fail("must be between 1 and 17");
  return out;
}

// ---------------------------------------------------------------------------
// Manifest writing

std::string num(double v) { return fmt::format("{}", v); }

void emit_doubles(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << num(x);
  e << YAML::EndSeq;
}

void emit_four(YAML::Emitter& e, const std::array<double, 4>& v) {
  emit_doubles(e, std::vector<double>(v.begin(), v.end()));
}

void emit_params(YAML::Emitter& e, const StrategyParams& params) {
  e << YAML::BeginMap;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DfSplit>) {
          e << YAML::Key << "alpha" << YAML::Value;
          emit_four(e, p.alpha);
          e << YAML::Key << "beta" << YAML::Value;
          emit_four(e, p.beta);
        } else if constexpr (std::is_same_v<T, CfSplit>) {
          e << YAML::Key << "pu1" << YAML::Value << num(p.pu1);
          e << YAML::Key << "pv1" << YAML::Value << num(p.pv1);
          e << YAML::Key << "pu2" << YAML::Value << num(p.pu2);
          e << YAML::Key << "pv2" << YAML::Value << num(p.pv2);
          e << YAML::Key << "ntilde1" << YAML::Value << num(p.ntilde1);
          e << YAML::Key << "ntilde2" << YAML::Value << num(p.ntilde2);
        } else if constexpr (std::is_same_v<T, MacccPowers>) {
          e << YAML::Key << "p1" << YAML::Value << num(p.p1);
          e << YAML::Key << "p2" << YAML::Value << num(p.p2);
        } else {
          e << YAML::Key << "phases" << YAML::Value << YAML::BeginSeq;
          for (const auto& ph : p.mixture.components) {
            e << YAML::BeginMap;
            e << YAML::Key << "weight" << YAML::Value << num(ph.weight);
            e << YAML::Key << "p1" << YAML::Value << num(ph.p1);
            e << YAML::Key << "p2" << YAML::Value << num(ph.p2);
            e << YAML::Key << "alpha" << YAML::Value;
            emit_four(e, ph.split.alpha);
            e << YAML::Key << "beta" << YAML::Value;
            emit_four(e, ph.split.beta);
            e << YAML::EndMap;
          }
          e << YAML::EndSeq;
          e << YAML::Key << "destination_decodes_all_phases" << YAML::Value
            << p.destination_decodes_all_phases;
        }
      },
      params);
  e << YAML::EndMap;
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& what)
    : Error(fmt::format("config error at line {}: '{}': {}", line, key, what)),
      key_(key),
      line_(line) {}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kEvaluate: return "evaluate";
    case Command::kMinPower: return "min-power";
    case Command::kSweep: return "sweep";
    case Command::kRegion: return "region";
    case Command::kCfMinNoise: return "cf-min-noise";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.mark.line + 1, e.msg);
  }
  const Field top(root, "", 1);
  if (!top.present() || !root.IsMap()) throw ConfigError("<document>", 1, "expected a mapping");
  top.allow_only({"topology", "sources", "strategy", "command", "search", "output", "manifest"});

  Topology topology = parse_topology(top["topology"]);
  const SourceTriple triple = parse_sources(top["sources"]);

  const Field sf = top["strategy"];
  sf.require();
  sf.allow_only({"name", "params"});
  const Strategy strategy = sf["name"].wrap([&] { return parse_strategy(sf["name"].as_string()); });
  auto params = parse_params(strategy, sf["params"]);

  CommandOptions command = parse_command(top["command"], strategy);
  SearchConfig search = parse_search(top["search"]);
  OutputOptions output = parse_output(top["output"]);

  // Fixed parameters are checked against the model now so that errors point
  // at the config rather than surfacing mid-run.
  if (params) {
    sf["params"].wrap([&] {
      const StrategyPoint point{
          strategy, {topology.power_limit(0), topology.power_limit(1)}, *params};
      evaluate(topology, triple, point);
      return 0;
    });
  }
  return RunConfig{std::move(topology), triple, strategy, std::move(params), std::move(command),
                   search, std::move(output)};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", 0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_manifest(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;

  e << YAML::Key << "manifest" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "library_version" << YAML::Value << std::string(kVersion);
  e << YAML::Key << "seed" << YAML::Value << c.search.rng_seed;
  e << YAML::EndMap;

  e << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "distances" << YAML::Value << YAML::BeginSeq;
  for (const auto& row : c.topology.distances()) emit_doubles(e, row);
  e << YAML::EndSeq;
  e << YAML::Key << "kappa" << YAML::Value << num(c.topology.kappa());
  e << YAML::Key << "eta" << YAML::Value << num(c.topology.eta());
  e << YAML::Key << "noise" << YAML::Value;
  emit_doubles(e, c.topology.noise());
  e << YAML::Key << "power_limits" << YAML::Value;
  emit_doubles(e, c.topology.power_limits());
  e << YAML::EndMap;

  e << YAML::Key << "sources" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "triple" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "h1_given_2" << YAML::Value << num(c.triple.h1_given_2);
  e << YAML::Key << "h2_given_1" << YAML::Value << num(c.triple.h2_given_1);
  e << YAML::Key << "common" << YAML::Value << num(c.triple.common);
  e << YAML::EndMap << YAML::EndMap;

  e << YAML::Key << "strategy" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << std::string(to_string(c.strategy));
  e << YAML::Key << "params" << YAML::Value;
  if (c.params) {
    emit_params(e, *c.params);
  } else {
    e << "search";
  }
  e << YAML::EndMap;

  const auto& o = c.command;
  e << YAML::Key << "command" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << std::string(to_string(o.command));
  e << YAML::Key << "objective" << YAML::Value << std::string(to_string(o.objective));
  if (o.command == Command::kSweep) {
    e << YAML::Key << "parameter" << YAML::Value << std::string(to_string(o.parameter));
    e << YAML::Key << "values" << YAML::Value;
    emit_doubles(e, o.values);
    e << YAML::Key << "strategies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Strategy s : o.strategies) e << std::string(to_string(s));
    e << YAML::EndSeq;
  }
  if (o.command == Command::kRegion) e << YAML::Key << "resolution" << YAML::Value << o.resolution;
  if (o.command == Command::kCfMinNoise) {
    e << YAML::Key << "pu1" << YAML::Value << num(o.pu1);
    e << YAML::Key << "pv1" << YAML::Value << num(o.pv1);
    e << YAML::Key << "pu2" << YAML::Value << num(o.pu2);
    e << YAML::Key << "pv2" << YAML::Value << num(o.pv2);
    e << YAML::Key << "tol" << YAML::Value << num(o.tol);
  }
  e << YAML::EndMap;

  const auto& s = c.search;
  e << YAML::Key << "search" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "multistarts" << YAML::Value << s.multistarts;
  e << YAML::Key << "grid_resolution" << YAML::Value << s.grid_resolution;
  e << YAML::Key << "rng_seed" << YAML::Value << s.rng_seed;
  e << YAML::Key << "refine_iterations" << YAML::Value << s.refine_iterations;
  e << YAML::Key << "bisection_tol" << YAML::Value << num(s.bisection_tol);
  e << YAML::Key << "power_cap" << YAML::Value << num(s.power_cap);
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "path" << YAML::Value << c.output.path;
  e << YAML::Key << "precision" << YAML::Value << c.output.precision;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace macfcs::cli
