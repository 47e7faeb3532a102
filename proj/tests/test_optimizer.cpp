#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "macfcs/errors.hpp"
#include "macfcs/optimizer.hpp"

using namespace macfcs;

namespace {

const SourceTriple kHalf{0.5, 0.5, 0.5};

Topology sym(double d12, double dsd, double p = 1.0) { return Topology::symmetric(d12, dsd, p); }

double c2(double snr) { return 0.5 * std::log2(1.0 + snr); }

const DfSplit& df_params(const StrategyPoint& p) { return std::get<DfSplit>(p.params); }

}  // namespace

TEST_CASE("search configuration validation") {
  CHECK_NOTHROW(SearchConfig{}.validate());
  SearchConfig c;
  c.multistarts = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.bisection_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.power_cap = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.grid_resolution = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.refine_iterations = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("names of objectives and sweep parameters") {
  CHECK(parse_objective("symmetric") == PowerObjective::kSymmetric);
  CHECK(parse_objective("sum") == PowerObjective::kSum);
  CHECK_THROWS_AS(parse_objective("max"), InvalidArgument);
  for (auto p : {SweepParameter::kD12, SweepParameter::kD13D23, SweepParameter::kCommon,
                 SweepParameter::kPuFraction}) {
    CHECK(parse_sweep_parameter(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_sweep_parameter("d99"), InvalidArgument);
}

TEST_CASE("feasible split examples") {
  const SearchConfig cfg;
  const auto t = sym(1, 1, 10);
  const auto mac = feasible_split(Strategy::kMaccc, t, kHalf, {10, 10}, cfg);
  REQUIRE(mac.has_value());
  CHECK(evaluate(t, kHalf, *mac).feasible());

  for (auto s : {Strategy::kMaccc, Strategy::kDecodeForward, Strategy::kCompressForward,
                 Strategy::kTdmaDecodeForward}) {
    CHECK_FALSE(feasible_split(s, sym(1, 1, 0), kHalf, {0, 0}, cfg).has_value());
  }

  const auto df = feasible_split(Strategy::kDecodeForward, t, kHalf, {10, 10}, cfg);
  REQUIRE(df.has_value());
  const auto report = evaluate(t, kHalf, *df);
  CHECK(report.feasible());
  CHECK(report.min_slack() > 0.0);
}

TEST_CASE("strong inter-source link leads to cooperation") {
  const auto t = sym(0.1, 1.0, 3.0);
  const auto df = feasible_split(Strategy::kDecodeForward, t, kHalf, {3, 3}, SearchConfig{});
  REQUIRE(df.has_value());
  CHECK(df_params(*df).alpha[DfSplit::kW0] > 0.0);
  CHECK(df_params(*df).beta[DfSplit::kW0] > 0.0);
}

TEST_CASE("best split always returns a point") {
  const auto t = sym(1, 1, 0.1);
  const auto p = best_split(Strategy::kDecodeForward, t, kHalf, {0.1, 0.1}, SearchConfig{});
  CHECK(p.strategy == Strategy::kDecodeForward);
  CHECK_FALSE(evaluate(t, kHalf, p).feasible());
}

TEST_CASE("minimum power: MAC closed-form inversion") {
  SearchConfig cfg;
  const auto r = min_power(Strategy::kMaccc, sym(1, 1), kHalf, PowerObjective::kSymmetric, cfg);
  CHECK(std::abs(r.p_star - 3.5) <= cfg.bisection_tol);
  CHECK(r.p_star >= 3.5);
  CHECK_FALSE(r.monotonicity_violation);
  CHECK(evaluate(sym(1, 1, r.p_star), kHalf, r.witness).feasible());

  const auto zero = min_power(Strategy::kMaccc, sym(1, 1), SourceTriple{}, PowerObjective::kSymmetric, cfg);
  CHECK(zero.p_star == 0.0);

  cfg.power_cap = 1.0;
  CHECK_THROWS_AS(min_power(Strategy::kMaccc, sym(1, 1), kHalf, PowerObjective::kSymmetric, cfg),
                  CapExceeded);
}

TEST_CASE("minimum power: bracket invariant") {
  const SearchConfig cfg;
  for (auto s : {Strategy::kMaccc, Strategy::kDecodeForward}) {
    const auto t = sym(0.5, 1.0);
    const auto r = min_power(s, t, kHalf, PowerObjective::kSymmetric, cfg);
    const double up = r.p_star + cfg.bisection_tol;
    CHECK(feasible_split(s, t, kHalf, {up, up}, cfg).has_value());
    const double down = r.p_star - cfg.bisection_tol;
    CHECK_FALSE(feasible_split(s, t, kHalf, {down, down}, cfg).has_value());
  }
}

TEST_CASE("minimum power: coherent bound for a near-free inter-source link") {
  const SearchConfig cfg;
  const auto r = min_power(Strategy::kDecodeForward, sym(1e-3, 1.0), kHalf,
                           PowerObjective::kSymmetric, cfg);
  CHECK(r.p_star >= 1.75 - cfg.bisection_tol);
  CHECK(r.p_star < 3.5);
  // Closed form: 1/2 log2(1 + 4P) >= 1.5.
  CHECK(c2(4 * r.p_star) >= 1.5 - 1e-4);
}

TEST_CASE("minimum power is monotone in gains and entropies") {
  const SearchConfig cfg;
  const auto obj = PowerObjective::kSymmetric;
  for (auto s : {Strategy::kMaccc, Strategy::kDecodeForward}) {
    const double far = min_power(s, sym(1, 1.5), kHalf, obj, cfg).p_star;
    const double near = min_power(s, sym(1, 1.0), kHalf, obj, cfg).p_star;
    CHECK(near <= far + cfg.bisection_tol);
    const double less = min_power(s, sym(1, 1.0), SourceTriple{0.25, 0.5, 0.5}, obj, cfg).p_star;
    CHECK(less <= near + cfg.bisection_tol);
  }
}

TEST_CASE("minimum power: sum objective") {
  const SearchConfig cfg;
  const auto sym_r = min_power(Strategy::kMaccc, sym(1, 1), kHalf, PowerObjective::kSymmetric, cfg);
  const auto sum_r = min_power(Strategy::kMaccc, sym(1, 1), kHalf, PowerObjective::kSum, cfg);
  CHECK(sum_r.p_star <= 2 * sym_r.p_star + cfg.bisection_tol);
  // For the MAC the sum constraint only sees P1 + P2: 2^3 - 1 = 7.
  CHECK(sum_r.p_star == doctest::Approx(7.0).epsilon(1e-3));
  CHECK(sum_r.witness.budget[0] + sum_r.witness.budget[1] ==
        doctest::Approx(sum_r.p_star).epsilon(1e-9));
}

TEST_CASE("best strategy never needs more power than the MAC") {
  const SearchConfig cfg;
  const auto obj = PowerObjective::kSymmetric;
  for (const auto& t : {sym(1, 1), sym(3, 1), sym(0.5, 2)}) {
    const double mac = min_power(Strategy::kMaccc, t, kHalf, obj, cfg).p_star;
    double best = mac;
    for (auto s : {Strategy::kDecodeForward, Strategy::kCompressForward}) {
      try {
        best = std::min(best, min_power(s, t, kHalf, obj, cfg).p_star);
      } catch (const CapExceeded&) {
      }
    }
    CHECK(best <= mac + cfg.bisection_tol);
  }
}

TEST_CASE("sweeps") {
  const SearchConfig cfg;
  const auto obj = PowerObjective::kSymmetric;
  const auto rows = sweep({Strategy::kMaccc}, sym(1, 1), SweepParameter::kD12, {2.0}, kHalf, obj, cfg);
  REQUIRE(rows.size() == 1);
  const auto direct = min_power(Strategy::kMaccc, sym(2, 1), kHalf, obj, cfg);
  CHECK(rows[0].result == direct.p_star);

  const auto df1 = sweep({Strategy::kDecodeForward}, sym(1, 1), SweepParameter::kD13D23, {1.5}, kHalf, obj, cfg);
  CHECK(df1[0].result == min_power(Strategy::kDecodeForward, sym(1, 1.5), kHalf, obj, cfg).p_star);

  const auto common = sweep({Strategy::kMaccc}, sym(1, 1), SweepParameter::kCommon, {0.0, 1.0},
                            kHalf, obj, cfg);
  REQUIRE(common.size() == 2);
  CHECK(*common[0].result < *common[1].result);

  const auto a = sweep({Strategy::kDecodeForward, Strategy::kMaccc}, sym(1, 1), SweepParameter::kD12,
                       {0.5, 2.0}, kHalf, obj, cfg);
  const auto b = sweep({Strategy::kDecodeForward, Strategy::kMaccc}, sym(1, 1), SweepParameter::kD12,
                       {0.5, 2.0}, kHalf, obj, cfg);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].strategy == b[i].strategy);
    CHECK(a[i].result == b[i].result);
  }
  CHECK(a[0].value == 0.5);
  CHECK(a[0].strategy == Strategy::kDecodeForward);
  CHECK(a[1].strategy == Strategy::kMaccc);

  CHECK_THROWS_AS(sweep({Strategy::kMaccc}, sym(1, 1), SweepParameter::kD12, {-1.0}, kHalf, obj, cfg),
                  InvalidArgument);
  CHECK_THROWS_AS(sweep({Strategy::kDecodeForward}, sym(1, 1, 10), SweepParameter::kPuFraction,
                        {0.5}, kHalf, obj, cfg),
                  InvalidArgument);
}

TEST_CASE("sweep of the compressed-carrier share") {
  const SearchConfig cfg;
  std::vector<double> f;
  for (int pu = 0; pu <= 9; ++pu) f.push_back(pu / 10.0);
  const auto rows = sweep({Strategy::kCompressForward}, sym(1, 1, 10), SweepParameter::kPuFraction,
                          f, kHalf, PowerObjective::kSymmetric, cfg);
  REQUIRE(rows.size() == 10);
  CHECK_FALSE(rows[0].result.has_value());
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(*rows[i].result < *rows[i - 1].result);
}

TEST_CASE("upper-right hull") {
  const std::vector<std::array<double, 2>> pts{{0, 2}, {1, 1.9}, {1.2, 1.0}, {2, 0}, {0.5, 0.5}};
  const auto h = upper_right_hull(pts);
  REQUIRE(h.size() >= 2);
  CHECK(h.front()[0] == 0.0);
  CHECK(h.back()[1] == 0.0);
  for (const auto& p : pts) CHECK(hull_contains(h, p));
  CHECK(hull_contains(h, {1.3, 1.2}));  // filled in by time sharing
  CHECK_FALSE(hull_contains(h, {2.0, 1.0}));
  CHECK(upper_right_hull({}).empty());
}

TEST_CASE("MAC region is the capacity pentagon") {
  SearchConfig cfg;
  cfg.bisection_tol = 1e-6;
  const auto t = sym(1, 1, 10);
  const auto r = region(Strategy::kMaccc, t, {10, 4}, 12, cfg);
  const double c1 = c2(10), cc2 = c2(4), c3 = c2(14);
  for (const auto& p : r.points) {
    CHECK(p.r1 <= c1 + 1e-9);
    CHECK(p.r2 <= cc2 + 1e-9);
    CHECK(p.r1 + p.r2 <= c3 + 1e-9);
    const double outer = std::max({p.r1 / c1, p.r2 / cc2, (p.r1 + p.r2) / c3});
    CHECK(outer == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(hull_contains(r.hull, {p.r1, p.r2}));
  }
  CHECK(r.points.front().r1 == doctest::Approx(c1).epsilon(1e-5));
  CHECK(r.points.back().r2 == doctest::Approx(cc2).epsilon(1e-5));

  const auto z = region(Strategy::kMaccc, sym(1, 1, 0), {0, 0}, 5, cfg);
  REQUIRE(z.points.size() == 1);
  CHECK(z.points[0].r1 == 0.0);
  CHECK(z.points[0].r2 == 0.0);
  CHECK_THROWS_AS(region(Strategy::kMaccc, t, {1, 1}, 1, cfg), InvalidArgument);
}

TEST_CASE("decode-forward region is inside its hull") {
  SearchConfig cfg;
  cfg.bisection_tol = 1e-3;
  const auto r = region(Strategy::kDecodeForward, sym(1.5, 1, 5), {5, 5}, 8, cfg);
  for (const auto& p : r.points) {
    CHECK(p.r1 >= 0.0);
    CHECK(p.r2 >= 0.0);
    CHECK(hull_contains(r.hull, {p.r1, p.r2}));
  }
}
