#include "macfcs/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macfcs/errors.hpp"

namespace macfcs {

namespace {

constexpr double kBudgetSlack = 1e-12;
constexpr std::size_t kNode1 = 0;
constexpr std::size_t kNode2 = 1;
constexpr std::size_t kDest = 2;

void require_three_nodes(const Topology& topology) {
  if (topology.node_count() != 3) {
    throw InvalidArgument("strategies are defined for the three-node network");
  }
}

void check_fractions(const std::array<double, 4>& f, const char* who) {
  double sum = 0.0;
  for (double x : f) {
    if (!std::isfinite(x) || x < 0.0) {
      throw SplitOutOfBudget(std::string(who) + " has a negative power fraction");
    }
    sum += x;
  }
  if (sum > 1.0 + kBudgetSlack) {
    throw SplitOutOfBudget(std::string(who) + " power fractions sum to more than 1");
  }
}

void check_power(double p, double limit, const char* who) {
  if (!std::isfinite(p) || p < 0.0) throw SplitOutOfBudget(std::string(who) + " is negative");
  if (p > limit * (1.0 + kBudgetSlack) + kBudgetSlack) {
    throw SplitOutOfBudget(std::string(who) + " exceeds the node's power limit");
  }
}

double sum_of(const std::array<double, 4>& f) { return f[0] + f[1] + f[2] + f[3]; }

std::vector<double> scaled(const std::vector<double>& v, double c) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

std::vector<double> plus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

std::vector<double> unit(std::size_t n, std::size_t k, double amplitude = 1.0) {
  std::vector<double> v(n, 0.0);
  v[k] = amplitude;
  return v;
}

// Shorthand for I(a;b|c) over variable ids.
struct Mi {
  const GaussianSystem& s;
  double operator()(std::initializer_list<VarId> a, std::initializer_list<VarId> b,
                    std::initializer_list<VarId> c = {}) const {
    return mutual_info(s, std::span<const VarId>(a.begin(), a.size()),
                       std::span<const VarId>(b.begin(), b.size()),
                       std::span<const VarId>(c.begin(), c.size()));
  }
};

ConstraintEntry demand_row(std::string label, double lhs, double rhs) {
  return ConstraintEntry{std::move(label), lhs, rhs, true, true};
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kDecodeForward: return "df";
    case Strategy::kCompressForward: return "cf";
    case Strategy::kMaccc: return "maccc";
    case Strategy::kTdmaDecodeForward: return "tdma_df";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "df") return Strategy::kDecodeForward;
  if (name == "cf") return Strategy::kCompressForward;
  if (name == "maccc") return Strategy::kMaccc;
  if (name == "tdma_df") return Strategy::kTdmaDecodeForward;
  throw InvalidArgument("unknown strategy '" + std::string(name) +
                        "' (expected df, cf, maccc or tdma_df)");
}

bool ConstraintEntry::satisfied() const {
  if (vacuous()) return true;
  return strict ? slack() > 0.0 : slack() >= 0.0;
}

bool ConstraintReport::feasible() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ConstraintEntry& e) { return e.satisfied(); });
}

double ConstraintReport::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) m = std::min(m, e.slack());
  return m;
}

double ConstraintReport::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    if (!e.vacuous()) m = std::min(m, e.slack());
  }
  return m;
}

const ConstraintEntry& ConstraintReport::at(std::string_view label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw InvalidArgument("no constraint labelled '" + std::string(label) + "'");
}

// ---------------------------------------------------------------------------
// Decode-forward

DfModel df_model(const Topology& topology, const DfSplit& split) {
  require_three_nodes(topology);
  check_fractions(split.alpha, "alpha");
  check_fractions(split.beta, "beta");

  // Latents: W0 W1 W2 V1 V2 Z1 Z2 Z3
  constexpr std::size_t n = 8;
  const double p1 = topology.power_limit(kNode1);
  const double p2 = topology.power_limit(kNode2);

  std::vector<double> x1(n, 0.0), x2(n, 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    x1[k] = std::sqrt(split.alpha[k] * p1);
    x2[k] = std::sqrt(split.beta[k] * p2);
  }
  x1[3] = std::sqrt(split.alpha[DfSplit::kFresh] * p1);
  x2[4] = std::sqrt(split.beta[DfSplit::kFresh] * p2);

  const double g12 = gain(topology, kNode1, kNode2);
  const double g21 = gain(topology, kNode2, kNode1);
  const double g13 = gain(topology, kNode1, kDest);
  const double g23 = gain(topology, kNode2, kDest);

  GaussianSystem s(n);
  const VarId w0 = s.add("W_0", unit(n, 0));
  const VarId w1 = s.add("W_1", unit(n, 1));
  const VarId w2 = s.add("W_2", unit(n, 2));
  s.add("V_1", unit(n, 3));
  s.add("V_2", unit(n, 4));
  const VarId vx1 = s.add("X_1", x1);
  const VarId vx2 = s.add("X_2", x2);
  const VarId y1 =
      s.add("Y_1", plus(scaled(x2, std::sqrt(g21)), unit(n, 5, std::sqrt(topology.noise(kNode1)))));
  const VarId y2 =
      s.add("Y_2", plus(scaled(x1, std::sqrt(g12)), unit(n, 6, std::sqrt(topology.noise(kNode2)))));
  const VarId y3 = s.add("Y_3", plus(plus(scaled(x1, std::sqrt(g13)), scaled(x2, std::sqrt(g23))),
                                     unit(n, 7, std::sqrt(topology.noise(kDest)))));
  return DfModel{std::move(s), w0, w1, w2, vx1, vx2, y1, y2, y3};
}

GaussianSystem df_build(const Topology& topology, const DfSplit& split) {
  return df_model(topology, split).system;
}

DfTerms& DfTerms::operator+=(const DfTerms& o) {
  x12_y3 += o.x12_y3;
  x1_y2 += o.x1_y2;
  x2_y1 += o.x2_y1;
  w1_y3 += o.w1_y3;
  w2_y3 += o.w2_y3;
  x1_y3 += o.x1_y3;
  x2_y3 += o.x2_y3;
  w0_y3 += o.w0_y3;
  w01_y3 += o.w01_y3;
  w02_y3 += o.w02_y3;
  w12_y3 += o.w12_y3;
  x12_y3_given_w += o.x12_y3_given_w;
  return *this;
}

DfTerms DfTerms::scaled(double weight, bool keep_destination_terms) const {
  const double d = keep_destination_terms ? weight : 0.0;
  DfTerms t;
  t.x1_y2 = weight * x1_y2;
  t.x2_y1 = weight * x2_y1;
  t.x12_y3 = d * x12_y3;
  t.w1_y3 = d * w1_y3;
  t.w2_y3 = d * w2_y3;
  t.x1_y3 = d * x1_y3;
  t.x2_y3 = d * x2_y3;
  t.w0_y3 = d * w0_y3;
  t.w01_y3 = d * w01_y3;
  t.w02_y3 = d * w02_y3;
  t.w12_y3 = d * w12_y3;
  t.x12_y3_given_w = d * x12_y3_given_w;
  return t;
}

DfTerms df_terms(const Topology& topology, const DfSplit& split) {
  const DfModel m = df_model(topology, split);
  const Mi mi{m.system};
  DfTerms t;
  t.x12_y3 = mi({m.x1, m.x2}, {m.y3});
  t.x1_y2 = mi({m.x1}, {m.y2}, {m.w0, m.w1, m.w2, m.x2});
  t.x2_y1 = mi({m.x2}, {m.y1}, {m.w0, m.w1, m.w2, m.x1});
  t.w1_y3 = mi({m.w1}, {m.y3}, {m.w0, m.w2});
  t.w2_y3 = mi({m.w2}, {m.y3}, {m.w0, m.w1});
  t.x1_y3 = mi({m.x1}, {m.y3}, {m.w0, m.w1, m.w2, m.x2});
  t.x2_y3 = mi({m.x2}, {m.y3}, {m.w0, m.w1, m.w2, m.x1});
  t.w0_y3 = mi({m.w0}, {m.y3}, {m.w1, m.w2});
  t.w01_y3 = mi({m.w0, m.w1}, {m.y3}, {m.w2});
  t.w02_y3 = mi({m.w0, m.w2}, {m.y3}, {m.w1});
  t.w12_y3 = mi({m.w1, m.w2}, {m.y3}, {m.w0});
  t.x12_y3_given_w = mi({m.x1, m.x2}, {m.y3}, {m.w0, m.w1, m.w2});
  return t;
}

ConstraintReport df_report(const SourceTriple& triple, const DfTerms& t) {
  triple.validate();
  ConstraintReport r;
  r.entries = {
      demand_row("DF-1", triple.joint(), t.x12_y3),
      demand_row("DF-2a", triple.h1_given_2, t.x1_y2),
      demand_row("DF-2b", triple.h1_given_2, t.w1_y3 + t.x1_y3),
      demand_row("DF-3a", triple.h2_given_1, t.x2_y1),
      demand_row("DF-3b", triple.h2_given_1, t.w2_y3 + t.x2_y3),
      demand_row("DF-4", triple.common, t.w0_y3),
      demand_row("DF-5", triple.h1(), t.w01_y3 + t.x1_y3),
      demand_row("DF-6", triple.h2(), t.w02_y3 + t.x2_y3),
      demand_row("DF-7", triple.h1_given_2 + triple.h2_given_1, t.w12_y3 + t.x12_y3_given_w),
  };
  return r;
}

ConstraintReport df_constraints(const Topology& topology, const SourceTriple& triple,
                                const DfSplit& split) {
  return df_report(triple, df_terms(topology, split));
}

// ---------------------------------------------------------------------------
// Compress-forward

CfModel cf_model(const Topology& topology, const CfSplit& split) {
  require_three_nodes(topology);
  check_power(split.pu1, topology.power_limit(kNode1), "pu1");
  check_power(split.pv1, topology.power_limit(kNode1), "pv1");
  check_power(split.pu2, topology.power_limit(kNode2), "pu2");
  check_power(split.pv2, topology.power_limit(kNode2), "pv2");
  check_power(split.pu1 + split.pv1, topology.power_limit(kNode1), "pu1 + pv1");
  check_power(split.pu2 + split.pv2, topology.power_limit(kNode2), "pu2 + pv2");
  for (double nt : {split.ntilde1, split.ntilde2}) {
    if (!std::isfinite(nt) || nt <= 0.0) {
      throw NonpositiveCompressionNoise("compression noise variance must be positive and finite");
    }
  }

  // Latents: U1 V1 U2 V2 Z1 Z2 Z3 Zhat1 Zhat2
  constexpr std::size_t n = 9;
  std::vector<double> x1(n, 0.0), x2(n, 0.0);
  x1[0] = std::sqrt(split.pu1);
  x1[1] = std::sqrt(split.pv1);
  x2[2] = std::sqrt(split.pu2);
  x2[3] = std::sqrt(split.pv2);

  const double g12 = gain(topology, kNode1, kNode2);
  const double g21 = gain(topology, kNode2, kNode1);
  const double g13 = gain(topology, kNode1, kDest);
  const double g23 = gain(topology, kNode2, kDest);

  const auto y1c = plus(scaled(x2, std::sqrt(g21)), unit(n, 4, std::sqrt(topology.noise(kNode1))));
  const auto y2c = plus(scaled(x1, std::sqrt(g12)), unit(n, 5, std::sqrt(topology.noise(kNode2))));

  GaussianSystem s(n);
  const VarId u1 = s.add("U_1", unit(n, 0));
  const VarId u2 = s.add("U_2", unit(n, 2));
  s.add("V_1", unit(n, 1));
  s.add("V_2", unit(n, 3));
  const VarId vx1 = s.add("X_1", x1);
  const VarId vx2 = s.add("X_2", x2);
  const VarId y1 = s.add("Y_1", y1c);
  const VarId y2 = s.add("Y_2", y2c);
  const VarId y3 = s.add("Y_3", plus(plus(scaled(x1, std::sqrt(g13)), scaled(x2, std::sqrt(g23))),
                                     unit(n, 6, std::sqrt(topology.noise(kDest)))));
  const VarId yt1 = s.add("Ytilde_1", plus(y1c, unit(n, 7, std::sqrt(split.ntilde1))));
  const VarId yt2 = s.add("Ytilde_2", plus(y2c, unit(n, 8, std::sqrt(split.ntilde2))));
  return CfModel{std::move(s), u1, u2, vx1, vx2, y1, y2, y3, yt1, yt2};
}

GaussianSystem cf_build(const Topology& topology, const CfSplit& split) {
  return cf_model(topology, split).system;
}

namespace {

std::vector<ConstraintEntry> compression_rows(const CfModel& m) {
  const Mi mi{m.system};
  const double q1 = mi({m.yt1}, {m.y1}, {m.x1, m.u1});
  const double q2 = mi({m.yt2}, {m.y2}, {m.x2, m.u2});
  const double s1 = mi({m.yt1}, {m.y3}, {m.yt2, m.u1, m.u2});
  const double s2 = mi({m.yt2}, {m.y3}, {m.yt1, m.u1, m.u2});
  const double s12 = mi({m.yt1, m.yt2}, {m.y3}, {m.u1, m.u2});
  const double c1 = mi({m.u1}, {m.y3}, {m.u2});
  const double c2 = mi({m.u2}, {m.y3}, {m.u1});
  const double c12 = mi({m.u1, m.u2}, {m.y3});
  return {
      ConstraintEntry{"CF-F1", q1 - s1, c1, true, false},
      ConstraintEntry{"CF-F2", q2 - s2, c2, true, false},
      ConstraintEntry{"CF-F3", q1 + q2 - s12, c12, true, false},
  };
}

}  // namespace

ConstraintReport cf_compression_constraints(const Topology& topology, const CfSplit& split) {
  return ConstraintReport{compression_rows(cf_model(topology, split))};
}

ConstraintReport cf_constraints(const Topology& topology, const SourceTriple& triple,
                                const CfSplit& split) {
  triple.validate();
  const CfModel m = cf_model(topology, split);
  const Mi mi{m.system};
  ConstraintReport r;
  r.entries = {
      demand_row("CF-R1", triple.h1_given_2, mi({m.x1}, {m.yt1, m.yt2, m.y3}, {m.u1, m.u2, m.x2})),
      demand_row("CF-R2", triple.h2_given_1, mi({m.x2}, {m.yt1, m.yt2, m.y3}, {m.u1, m.u2, m.x1})),
      demand_row("CF-R12", triple.joint(), mi({m.x1, m.x2}, {m.yt1, m.yt2, m.y3}, {m.u1, m.u2})),
  };
  for (auto& e : compression_rows(m)) r.entries.push_back(std::move(e));
  return r;
}

std::optional<std::pair<double, double>> cf_min_noise(const Topology& topology, double pu1,
                                                      double pv1, double pu2, double pv2,
                                                      double tol) {
  if (!std::isfinite(tol) || tol <= 0.0) throw InvalidTolerance("tolerance must be positive");
  auto feasible = [&](double nt) {
    return cf_compression_constraints(topology, CfSplit{pu1, pv1, pu2, pv2, nt, nt}).feasible();
  };
  double lo = kCfNoiseFloor;
  double hi = kCfNoiseCap;
  if (feasible(lo)) return std::pair{lo, lo};
  if (!feasible(hi)) return std::nullopt;

  // The compression cost falls as the noise grows: geometric steps first,
  // then plain bisection down to the absolute tolerance.
  while (hi / lo > 2.0) {
    const double mid = std::sqrt(lo * hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return std::pair{hi, hi};
}

// ---------------------------------------------------------------------------
// Multiple access code without cooperation

ConstraintReport maccc_constraints(const Topology& topology, const SourceTriple& triple,
                                   double p1, double p2) {
  require_three_nodes(topology);
  triple.validate();
  check_power(p1, topology.power_limit(kNode1), "p1");
  check_power(p2, topology.power_limit(kNode2), "p2");

  constexpr std::size_t n = 3;
  GaussianSystem s(n);
  const VarId x1 = s.add("X_1", unit(n, 0, std::sqrt(p1)));
  const VarId x2 = s.add("X_2", unit(n, 1, std::sqrt(p2)));
  const double a13 = std::sqrt(gain(topology, kNode1, kDest) * p1);
  const double a23 = std::sqrt(gain(topology, kNode2, kDest) * p2);
  const VarId y3 = s.add("Y_3", {a13, a23, std::sqrt(topology.noise(kDest))});
  const Mi mi{s};

  ConstraintReport r;
  r.entries = {
      ConstraintEntry{"MAC-1", triple.h1_given_2, mi({x1}, {y3}, {x2}), false, true},
      ConstraintEntry{"MAC-2", triple.h2_given_1, mi({x2}, {y3}, {x1}), false, true},
      ConstraintEntry{"MAC-3", triple.joint(), mi({x1, x2}, {y3}), false, true},
  };
  return r;
}

// ---------------------------------------------------------------------------
// Half-duplex three-phase decode-forward

void validate_tdma(const Topology& topology, const TimeShareMixture& mixture) {
  require_three_nodes(topology);
  const auto& c = mixture.components;
  if (c.size() != 3) throw BadPhaseStructure("the half-duplex schedule has exactly three phases");

  double weight_sum = 0.0;
  for (const auto& ph : c) {
    if (!std::isfinite(ph.weight) || ph.weight < 0.0 || ph.weight > 1.0) {
      throw BadPhaseStructure("phase weights must lie in [0, 1]");
    }
    weight_sum += ph.weight;
    check_fractions(ph.split.alpha, "alpha");
    check_fractions(ph.split.beta, "beta");
    if (!std::isfinite(ph.p1) || ph.p1 < 0.0 || !std::isfinite(ph.p2) || ph.p2 < 0.0) {
      throw SplitOutOfBudget("phase powers must be nonnegative");
    }
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) throw BadPhaseStructure("phase weights must sum to 1");

  auto silent = [](double p, const std::array<double, 4>& f) { return p == 0.0 || sum_of(f) == 0.0; };
  auto fresh_only = [](double p, const std::array<double, 4>& f) {
    return p == 0.0 || (f[0] == 0.0 && f[1] == 0.0 && f[2] == 0.0);
  };
  auto no_fresh = [](double p, const std::array<double, 4>& f) {
    return p == 0.0 || f[DfSplit::kFresh] == 0.0;
  };
  if (!silent(c[0].p2, c[0].split.beta) || !fresh_only(c[0].p1, c[0].split.alpha)) {
    throw BadPhaseStructure("phase 0 must carry only node 1's fresh signal");
  }
  if (!silent(c[1].p1, c[1].split.alpha) || !fresh_only(c[1].p2, c[1].split.beta)) {
    throw BadPhaseStructure("phase 1 must carry only node 2's fresh signal");
  }
  if (!no_fresh(c[2].p1, c[2].split.alpha) || !no_fresh(c[2].p2, c[2].split.beta)) {
    throw BadPhaseStructure("phase 2 inputs must be functions of W0, W1, W2 only");
  }

  double avg1 = 0.0, avg2 = 0.0;
  for (const auto& ph : c) {
    avg1 += ph.weight * ph.p1 * sum_of(ph.split.alpha);
    avg2 += ph.weight * ph.p2 * sum_of(ph.split.beta);
  }
  check_power(avg1, topology.power_limit(kNode1), "average power of node 1");
  check_power(avg2, topology.power_limit(kNode2), "average power of node 2");
}

ConstraintReport tdma_df_constraints(const Topology& topology, const SourceTriple& triple,
                                     const TimeShareMixture& mixture,
                                     bool destination_decodes_all_phases) {
  validate_tdma(topology, mixture);
  DfTerms avg;
  for (std::size_t q = 0; q < mixture.components.size(); ++q) {
    const auto& ph = mixture.components[q];
    if (ph.weight == 0.0) continue;
    const bool keep = destination_decodes_all_phases || q == 2;
    const Topology phase_topology = topology.with_power_limits({ph.p1, ph.p2});
    avg += df_terms(phase_topology, ph.split).scaled(ph.weight, keep);
  }
  return df_report(triple, avg);
}

ConstraintReport evaluate(const Topology& topology, const SourceTriple& triple,
                          const StrategyPoint& point) {
  const Topology t = topology.with_power_limits({point.budget[0], point.budget[1]});
  return std::visit(
      [&](const auto& p) -> ConstraintReport {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MacccPowers>) {
          return maccc_constraints(t, triple, p.p1, p.p2);
        } else if constexpr (std::is_same_v<T, DfSplit>) {
          return df_constraints(t, triple, p);
        } else if constexpr (std::is_same_v<T, CfSplit>) {
          return cf_constraints(t, triple, p);
        } else {
          return tdma_df_constraints(t, triple, p.mixture, p.destination_decodes_all_phases);
        }
      },
      point.params);
}

}  // namespace macfcs
