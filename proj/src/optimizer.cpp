#include "macfcs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "macfcs/errors.hpp"

namespace macfcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compression noise is searched on a log10 scale over this range.
constexpr double kLogNoiseLo = -4.0;
constexpr double kLogNoiseHi = 12.0;

// Largest rate probed when tracing a region ray.
constexpr double kRegionRateCap = 64.0;

using Point = std::vector<double>;

// Maps the unit cube [0,1]^dims onto a strategy's parameters.
struct Parametrization {
  std::size_t dims = 0;
  std::function<StrategyPoint(const Point&)> decode;
  std::vector<Point> seeds;
};

std::array<double, 4> normalized4(double a, double b, double c, double d) {
  const double s = a + b + c + d;
  if (s <= 0.0) return {0.25, 0.25, 0.25, 0.25};
  return {a / s, b / s, c / s, d / s};
}

std::array<double, 3> normalized3(double a, double b, double c) {
  const double s = a + b + c;
  if (s <= 0.0) return {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return {a / s, b / s, c / s};
}

// All compositions of `parts` nonnegative multiples of 1/resolution summing
// to 1.
std::vector<std::vector<double>> simplex_grid(std::size_t parts, int resolution) {
  std::vector<std::vector<double>> out;
  std::vector<int> counts(parts, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == parts) {
      counts[i] = left;
      std::vector<double> v(parts);
      for (std::size_t k = 0; k < parts; ++k) v[k] = static_cast<double>(counts[k]) / resolution;
      out.push_back(std::move(v));
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, resolution);
  return out;
}

Parametrization maccc_parametrization(std::array<double, 2> powers) {
  Parametrization p;
  p.dims = 0;
  p.decode = [powers](const Point&) {
    return StrategyPoint{Strategy::kMaccc, powers, MacccPowers{powers[0], powers[1]}};
  };
  p.seeds = {Point{}};
  return p;
}

Parametrization df_parametrization(std::array<double, 2> powers, const SearchConfig& config) {
  Parametrization p;
  p.dims = 8;
  p.decode = [powers](const Point& x) {
    DfSplit s;
    s.alpha = normalized4(x[0], x[1], x[2], x[3]);
    s.beta = normalized4(x[4], x[5], x[6], x[7]);
    return StrategyPoint{Strategy::kDecodeForward, powers, s};
  };
  // Mirror-symmetric splits: node 2 uses node 1's weights with W1 and W2
  // swapped. The no-cooperation point comes first.
  p.seeds.push_back({0, 0, 0, 1, 0, 0, 0, 1});
  for (const auto& a : simplex_grid(4, config.grid_resolution)) {
    p.seeds.push_back({a[0], a[1], a[2], a[3], a[0], a[2], a[1], a[3]});
  }
  return p;
}

std::vector<double> cf_fraction_list(int resolution) {
  std::vector<double> f = {1e-4, 1e-3, 1e-2, 0.05};
  for (int k = 1; k < 2 * resolution; ++k) f.push_back(static_cast<double>(k) / (2 * resolution));
  return f;
}

double noise_to_unit(double nt) {
  return std::clamp((std::log10(nt) - kLogNoiseLo) / (kLogNoiseHi - kLogNoiseLo), 0.0, 1.0);
}

Parametrization cf_parametrization(const Topology& topology, std::array<double, 2> powers,
                                   const SearchConfig& config) {
  Parametrization p;
  p.dims = 4;
  p.decode = [powers](const Point& x) {
    CfSplit s;
    s.pu1 = x[0] * powers[0];
    s.pv1 = powers[0] - s.pu1;
    s.pu2 = x[1] * powers[1];
    s.pv2 = powers[1] - s.pu2;
    s.ntilde1 = std::pow(10.0, kLogNoiseLo + x[2] * (kLogNoiseHi - kLogNoiseLo));
    s.ntilde2 = std::pow(10.0, kLogNoiseLo + x[3] * (kLogNoiseHi - kLogNoiseLo));
    return StrategyPoint{Strategy::kCompressForward, powers, s};
  };

  // For a given carrier split the rates only fall as the compression noise
  // grows, so each seed starts at the smallest feasible common noise.
  const Topology t = topology.with_power_limits({powers[0], powers[1]});
  auto seed = [&](double f1, double f2) {
    const double pu1 = f1 * powers[0];
    const double pu2 = f2 * powers[1];
    const auto nt = cf_min_noise(t, pu1, powers[0] - pu1, pu2, powers[1] - pu2, 1e-3);
    const double u = nt ? noise_to_unit(nt->first * (1.0 + 1e-6)) : 1.0;
    p.seeds.push_back({f1, f2, u, u});
  };
  const auto fractions = cf_fraction_list(config.grid_resolution);
  for (double f : fractions) seed(f, f);
  for (double f1 : {1e-3, 0.05, 0.25, 0.5}) {
    for (double f2 : {1e-3, 0.05, 0.25, 0.5}) {
      if (f1 != f2) seed(f1, f2);
    }
  }
  return p;
}

Parametrization tdma_parametrization(std::array<double, 2> powers, const SearchConfig& config) {
  Parametrization p;
  p.dims = 11;
  p.decode = [powers](const Point& x) {
    const auto w = normalized3(x[0], x[1], x[2]);
    const auto a = normalized3(x[5], x[6], x[7]);
    const auto b = normalized3(x[8], x[9], x[10]);

    // Energy of node i split between its solo phase and the joint phase.
    auto phase_powers = [&](double budget, double solo_weight, double share) {
      double solo = share;
      if (solo_weight == 0.0) solo = 0.0;
      if (w[2] == 0.0) solo = solo_weight == 0.0 ? 0.0 : 1.0;
      const double p_solo = solo_weight > 0.0 ? solo * budget / solo_weight : 0.0;
      const double p_joint = w[2] > 0.0 ? (1.0 - solo) * budget / w[2] : 0.0;
      return std::pair{p_solo, p_joint};
    };
    const auto [p1_solo, p1_joint] = phase_powers(powers[0], w[0], x[3]);
    const auto [p2_solo, p2_joint] = phase_powers(powers[1], w[1], x[4]);

    TimeShareMixture m;
    TdmaPhase ph0{w[0], p1_solo, 0.0, {}};
    ph0.split.alpha = {0, 0, 0, 1};
    TdmaPhase ph1{w[1], 0.0, p2_solo, {}};
    ph1.split.beta = {0, 0, 0, 1};
    TdmaPhase ph2{w[2], p1_joint, p2_joint, {}};
    ph2.split.alpha = {a[0], a[1], a[2], 0.0};
    ph2.split.beta = {b[0], b[1], b[2], 0.0};
    m.components = {ph0, ph1, ph2};
    return StrategyPoint{Strategy::kTdmaDecodeForward, powers, TdmaSchedule{m, true}};
  };
  const std::vector<std::array<double, 6>> splits = {
      {1, 0, 0, 1, 0, 0}, {1, 1, 1, 1, 1, 1}, {1, 1, 0, 1, 0, 1}, {2, 1, 0, 2, 0, 1}};
  for (const auto& w : simplex_grid(3, config.grid_resolution)) {
    for (double share : {0.25, 0.5}) {
      for (const auto& s : splits) {
        p.seeds.push_back({w[0], w[1], w[2], share, share, s[0], s[1], s[2], s[3], s[4], s[5]});
      }
    }
  }
  return p;
}

Parametrization parametrization_for(Strategy strategy, const Topology& topology,
                                    std::array<double, 2> powers, const SearchConfig& config) {
  switch (strategy) {
    case Strategy::kMaccc: return maccc_parametrization(powers);
    case Strategy::kDecodeForward: return df_parametrization(powers, config);
    case Strategy::kCompressForward: return cf_parametrization(topology, powers, config);
    case Strategy::kTdmaDecodeForward: return tdma_parametrization(powers, config);
  }
  throw InvalidArgument("unknown strategy");
}

struct Scored {
  Point x;
  double score = -kInf;
  bool feasible = false;
};

class Search {
 public:
  Search(const Topology& topology, const SourceTriple& triple, Parametrization param,
         const SearchConfig& config)
      : topology_(topology), triple_(triple), param_(std::move(param)), config_(config) {}

  // Returns the first feasible point found, or the best-scoring point seen
  // with found == false.
  struct Outcome {
    StrategyPoint point;
    bool found = false;
  };

  Outcome run() {
    std::vector<Scored> candidates;
    for (const auto& s : param_.seeds) {
      auto c = score(s);
      if (c.feasible) return {param_.decode(c.x), true};
      candidates.push_back(std::move(c));
    }
    if (param_.dims == 0) return {param_.decode(candidates.front().x), false};

    for (int k = 0; k < config_.multistarts; ++k) {
      auto rng = stream(static_cast<std::uint64_t>(k));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Point x(param_.dims);
      for (auto& v : x) v = u(rng);
      auto c = score(x);
      if (c.feasible) return {param_.decode(c.x), true};
      candidates.push_back(std::move(c));
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    const std::size_t polish =
        std::min(candidates.size(), static_cast<std::size_t>(config_.multistarts));
    Scored best = candidates.front();
    for (std::size_t i = 0; i < polish; ++i) {
      auto polished = refine(candidates[i], i);
      if (polished.feasible) return {param_.decode(polished.x), true};
      if (polished.score > best.score) best = std::move(polished);
    }
    return {param_.decode(best.x), false};
  }

 private:
  std::mt19937_64 stream(std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(config_.rng_seed),
                      static_cast<std::uint32_t>(config_.rng_seed >> 32),
                      static_cast<std::uint32_t>(index), 0x6d6163u};
    return std::mt19937_64(seq);
  }

  Scored score(const Point& x) const {
    Scored s{x, -kInf, false};
    try {
      const auto report = evaluate(topology_, triple_, param_.decode(x));
      s.feasible = report.feasible();
      s.score = report.margin();
    } catch (const SingularCovariance&) {
      // Degenerate corner of the parameter space; leave it unscored.
    }
    return s;
  }

  // Coordinate descent on the smallest slack, with a few random directions
  // per sweep to step across the kinks of the min-of-slacks objective.
  Scored refine(Scored current, std::size_t start) const {
    auto rng = stream(0x10000u + start);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double step = 0.25;
    for (int it = 0; it < config_.refine_iterations; ++it) {
      bool improved = false;
      auto try_move = [&](const Point& dir) {
        Point y = current.x;
        bool moved = false;
        for (std::size_t k = 0; k < y.size(); ++k) {
          const double v = std::clamp(y[k] + step * dir[k], 0.0, 1.0);
          moved = moved || v != y[k];
          y[k] = v;
        }
        if (!moved) return false;
        auto c = score(y);
        if (c.feasible || c.score > current.score) {
          current = std::move(c);
          return true;
        }
        return false;
      };
      for (std::size_t k = 0; k < param_.dims && !current.feasible; ++k) {
        for (double sign : {1.0, -1.0}) {
          Point dir(param_.dims, 0.0);
          dir[k] = sign;
          if (try_move(dir)) {
            improved = true;
            break;
          }
        }
      }
      for (std::size_t r = 0; r < param_.dims && !current.feasible; ++r) {
        Point dir(param_.dims);
        double norm = 0.0;
        for (auto& v : dir) {
          v = gauss(rng);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        for (auto& v : dir) v /= norm;
        improved = try_move(dir) || improved;
      }
      if (current.feasible) return current;
      if (!improved) {
        step *= 0.5;
        if (step < 1e-7) break;
      }
    }
    return current;
  }

  const Topology& topology_;
  const SourceTriple& triple_;
  Parametrization param_;
  const SearchConfig& config_;
};

Topology apply_parameter(const Topology& t, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::kD12: return t.with_distance(0, 1, value);
    case SweepParameter::kD13D23: return t.with_distance(0, 2, value).with_distance(1, 2, value);
    default: return t;
  }
}

}  // namespace

void SearchConfig::validate() const {
  if (multistarts < 1) throw InvalidArgument("search.multistarts must be >= 1");
  if (grid_resolution < 1) throw InvalidArgument("search.grid_resolution must be >= 1");
  if (refine_iterations < 1) throw InvalidArgument("search.refine_iterations must be >= 1");
  if (!std::isfinite(bisection_tol) || bisection_tol <= 0.0) {
    throw InvalidArgument("search.bisection_tol must be positive");
  }
  if (!std::isfinite(power_cap) || power_cap <= 0.0) {
    throw InvalidArgument("search.power_cap must be positive");
  }
}

namespace {

Search::Outcome run_search(Strategy strategy, const Topology& topology, const SourceTriple& triple,
                           std::array<double, 2> powers, const SearchConfig& config) {
  config.validate();
  triple.validate();
  for (double p : powers) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("powers must be nonnegative");
  }
  const Topology t = topology.with_power_limits({powers[0], powers[1]});
  Search search(t, triple, parametrization_for(strategy, t, powers, config), config);
  return search.run();
}

}  // namespace

std::optional<StrategyPoint> feasible_split(Strategy strategy, const Topology& topology,
                                            const SourceTriple& triple,
                                            std::array<double, 2> powers,
                                            const SearchConfig& config) {
  auto outcome = run_search(strategy, topology, triple, powers, config);
  if (!outcome.found) return std::nullopt;
  return std::move(outcome.point);
}

StrategyPoint best_split(Strategy strategy, const Topology& topology, const SourceTriple& triple,
                         std::array<double, 2> powers, const SearchConfig& config) {
  return run_search(strategy, topology, triple, powers, config).point;
}

std::string_view to_string(PowerObjective o) {
  return o == PowerObjective::kSymmetric ? "symmetric" : "sum";
}

PowerObjective parse_objective(std::string_view name) {
  if (name == "symmetric") return PowerObjective::kSymmetric;
  if (name == "sum") return PowerObjective::kSum;
  throw InvalidArgument("unknown objective '" + std::string(name) + "' (expected symmetric or sum)");
}

MinPowerResult min_power(Strategy strategy, const Topology& topology, const SourceTriple& triple,
                         PowerObjective objective, const SearchConfig& config) {
  config.validate();
  triple.validate();

  // Candidate per-node budgets for a given power scale.
  auto budgets = [&](double scale) {
    std::vector<std::array<double, 2>> out;
    if (objective == PowerObjective::kSymmetric) {
      out.push_back({scale, scale});
      return out;
    }
    const int m = 2 * config.grid_resolution;
    std::vector<double> lambdas;
    for (int k = 0; k <= m; ++k) lambdas.push_back(static_cast<double>(k) / m);
    std::stable_sort(lambdas.begin(), lambdas.end(), [](double a, double b) {
      return std::abs(a - 0.5) < std::abs(b - 0.5);
    });
    for (double l : lambdas) out.push_back({l * scale, (1.0 - l) * scale});
    return out;
  };
  auto feasible_at = [&](double scale) -> std::optional<StrategyPoint> {
    for (const auto& b : budgets(scale)) {
      if (auto p = feasible_split(strategy, topology, triple, b, config)) return p;
    }
    return std::nullopt;
  };

  MinPowerResult result;
  if (triple.is_zero()) {
    if (auto w = feasible_at(0.0)) {
      result.p_star = 0.0;
      result.witness = *w;
      return result;
    }
  }

  double lo = 0.0;
  double hi = std::min(1.0, config.power_cap);
  std::optional<StrategyPoint> witness = feasible_at(hi);
  while (!witness) {
    if (hi >= config.power_cap) {
      throw CapExceeded("no feasible " + std::string(to_string(strategy)) +
                        " point found at the power cap " + std::to_string(config.power_cap));
    }
    lo = hi;
    hi = std::min(2.0 * hi, config.power_cap);
    witness = feasible_at(hi);
  }
  while (hi - lo > config.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto w = feasible_at(mid)) {
      hi = mid;
      witness = std::move(w);
    } else {
      lo = mid;
    }
  }
  result.p_star = hi;
  result.witness = *witness;

  // Feasibility is only assumed monotone in power; probe below the result.
  for (int k = 1; k <= 8; ++k) {
    const double s = hi * k / 9.0;
    if (s >= lo) break;
    if (feasible_at(s)) {
      result.monotonicity_violation = true;
      result.lowest_feasible_below = s;
      break;
    }
  }
  return result;
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kD12: return "d12";
    case SweepParameter::kD13D23: return "d13_d23";
    case SweepParameter::kCommon: return "common";
    case SweepParameter::kPuFraction: return "pu_fraction";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "d12") return SweepParameter::kD12;
  if (name == "d13_d23") return SweepParameter::kD13D23;
  if (name == "common") return SweepParameter::kCommon;
  if (name == "pu_fraction") return SweepParameter::kPuFraction;
  throw InvalidArgument("unknown sweep parameter '" + std::string(name) +
                        "' (expected d12, d13_d23, common or pu_fraction)");
}

std::vector<SweepRow> sweep(const std::vector<Strategy>& strategies,
                            const Topology& topology_template, SweepParameter parameter,
                            const std::vector<double>& values, const SourceTriple& triple,
                            PowerObjective objective, const SearchConfig& config) {
  config.validate();
  std::vector<SweepRow> rows;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("sweep values must be finite");
    if (parameter == SweepParameter::kPuFraction) {
      if (v < 0.0 || v > 1.0) throw InvalidArgument("pu_fraction values must lie in [0, 1]");
      for (Strategy s : strategies) {
        if (s != Strategy::kCompressForward) {
          throw InvalidArgument("a pu_fraction sweep applies to the cf strategy only");
        }
      }
      const double p1 = topology_template.power_limit(0);
      const double p2 = topology_template.power_limit(1);
      const CfSplit base{v * p1, p1 - v * p1, v * p2, p2 - v * p2, 1.0, 1.0};
      SweepRow row{v, Strategy::kCompressForward, std::nullopt, std::nullopt};
      if (auto nt = cf_min_noise(topology_template, base.pu1, base.pv1, base.pu2, base.pv2,
                                 config.bisection_tol)) {
        CfSplit s = base;
        s.ntilde1 = nt->first;
        s.ntilde2 = nt->second;
        row.result = nt->first;
        row.witness = StrategyPoint{Strategy::kCompressForward, {p1, p2}, s};
      }
      rows.push_back(std::move(row));
      continue;
    }

    const Topology t = apply_parameter(topology_template, parameter, v);
    SourceTriple tr = triple;
    if (parameter == SweepParameter::kCommon) tr.common = v;
    for (Strategy s : strategies) {
      SweepRow row{v, s, std::nullopt, std::nullopt};
      try {
        auto r = min_power(s, t, tr, objective, config);
        row.result = r.p_star;
        row.witness = r.witness;
      } catch (const CapExceeded&) {
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

RegionResult region(Strategy strategy, const Topology& topology, std::array<double, 2> powers,
                    int resolution, const SearchConfig& config) {
  if (resolution < 2) throw InvalidArgument("region resolution must be >= 2");
  config.validate();

  RegionResult out;
  for (int k = 0; k < resolution; ++k) {
    const double theta = 0.5 * std::numbers::pi * k / (resolution - 1);
    double c = std::cos(theta);
    double s = std::sin(theta);
    if (k == 0) s = 0.0;
    if (k == resolution - 1) c = 0.0;

    auto feasible_at = [&](double t) {
      return feasible_split(strategy, topology, SourceTriple{t * c, t * s, 0.0}, powers, config);
    };
    double lo = 0.0;
    double hi = 1.0;
    std::optional<StrategyPoint> witness = feasible_at(0.0);
    while (auto w = feasible_at(hi)) {
      lo = hi;
      witness = std::move(w);
      if (hi >= kRegionRateCap) break;
      hi *= 2.0;
    }
    if (lo < hi) {
      while (hi - lo > config.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (auto w = feasible_at(mid)) {
          lo = mid;
          witness = std::move(w);
        } else {
          hi = mid;
        }
      }
    }
    RegionPoint p{lo * c, lo * s, strategy, witness};
    const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const auto& q) {
      return q.r1 == p.r1 && q.r2 == p.r2;
    });
    if (!duplicate) out.points.push_back(std::move(p));
  }

  std::vector<std::array<double, 2>> raw;
  for (const auto& p : out.points) raw.push_back({p.r1, p.r2});
  out.hull = upper_right_hull(raw);
  return out;
}

std::vector<std::array<double, 2>> upper_right_hull(const std::vector<std::array<double, 2>>& pts) {
  if (pts.empty()) return {};
  double xmax = 0.0, ymax = 0.0;
  for (const auto& p : pts) {
    xmax = std::max(xmax, p[0]);
    ymax = std::max(ymax, p[1]);
  }
  std::vector<std::array<double, 2>> all = pts;
  all.push_back({0.0, ymax});
  all.push_back({xmax, 0.0});
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] > b[1]);
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());

  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull;
  for (const auto& p : all) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

bool hull_contains(const std::vector<std::array<double, 2>>& hull, std::array<double, 2> p,
                   double tol) {
  if (hull.empty()) return false;
  const double xmax = hull.back()[0];
  if (p[0] < -tol || p[1] < -tol || p[0] > xmax + tol) return false;
  const double x = std::clamp(p[0], hull.front()[0], xmax);
  double height = -kInf;
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[i + 1];
    if (x < a[0] || x > b[0]) continue;
    if (b[0] == a[0]) {
      height = std::max({height, a[1], b[1]});
    } else {
      height = std::max(height, a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]));
    }
  }
  if (hull.size() == 1) height = hull.front()[1];
  return p[1] <= height + tol;
}

}  // namespace macfcs
