#pragma once

// Feasibility search over strategy parameters, power minimization, scenario
// sweeps and achievable-region tracing.
//
// The inner search is derivative-free: a deterministic structured grid of
// seeds, seeded random multistarts, then coordinate-descent polishing of the
// most promising candidates on the smallest constraint slack. All randomness
// comes from per-start generators derived from SearchConfig::rng_seed, so a
// fixed config reproduces its results bit for bit.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "macfcs/model.hpp"
#include "macfcs/strategies.hpp"

namespace macfcs {

struct SearchConfig {
  int multistarts = 12;
  int grid_resolution = 4;
  std::uint64_t rng_seed = 1;
  int refine_iterations = 30;
  double bisection_tol = 1e-4;
  double power_cap = 1e4;

  // Throws InvalidArgument.
  void validate() const;
};

// Returns a point whose constraint report is feasible at the given per-node
// budgets, or nullopt when the search budget runs out. nullopt is a failure
// to find, not a proof of infeasibility.
std::optional<StrategyPoint> feasible_split(Strategy strategy, const Topology& topology,
                                            const SourceTriple& triple,
                                            std::array<double, 2> powers,
                                            const SearchConfig& config);

// Like feasible_split, but always returns a point: the feasible one if found,
// otherwise the candidate with the largest smallest-slack.
StrategyPoint best_split(Strategy strategy, const Topology& topology, const SourceTriple& triple,
                         std::array<double, 2> powers, const SearchConfig& config);

enum class PowerObjective { kSymmetric, kSum };

std::string_view to_string(PowerObjective o);
PowerObjective parse_objective(std::string_view name);

struct MinPowerResult {
  // Per-node power for kSymmetric, P1 + P2 for kSum.
  double p_star = 0.0;
  StrategyPoint witness;
  // Set when the check below p_star found a feasible point, i.e. feasibility
  // was not monotone in power along the bisection.
  bool monotonicity_violation = false;
  std::optional<double> lowest_feasible_below;
};

// Bisection over the power scale with feasible_split as the oracle. Throws
// CapExceeded when nothing is feasible at config.power_cap.
MinPowerResult min_power(Strategy strategy, const Topology& topology, const SourceTriple& triple,
                         PowerObjective objective, const SearchConfig& config);

enum class SweepParameter { kD12, kD13D23, kCommon, kPuFraction };

std::string_view to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepRow {
  double value = 0.0;
  Strategy strategy = Strategy::kMaccc;
  // Minimum power, or for kPuFraction the smallest feasible compression noise.
  // nullopt when the cap was exceeded (or no compression noise works).
  std::optional<double> result;
  std::optional<StrategyPoint> witness;
};

// For kPuFraction the value is the fraction of each node's power limit put on
// the compressed-information carrier; every strategy entry is evaluated as cf.
std::vector<SweepRow> sweep(const std::vector<Strategy>& strategies,
                            const Topology& topology_template, SweepParameter parameter,
                            const std::vector<double>& values, const SourceTriple& triple,
                            PowerObjective objective, const SearchConfig& config);

struct RegionPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  Strategy strategy = Strategy::kMaccc;
  std::optional<StrategyPoint> parameters;
};

struct RegionResult {
  std::vector<RegionPoint> points;
  // Upper-right convex hull from (0, max r2) to (max r1, 0); the time-sharing
  // closure of the points.
  std::vector<std::array<double, 2>> hull;
};

// Traces the boundary of the rate pairs (r1, r2) deliverable to the
// destination with independent sources (triple (r1, r2, 0)), along
// `resolution` rays spread over the first quadrant.
RegionResult region(Strategy strategy, const Topology& topology, std::array<double, 2> powers,
                    int resolution, const SearchConfig& config);

std::vector<std::array<double, 2>> upper_right_hull(const std::vector<std::array<double, 2>>& pts);

// True when p lies inside the region bounded by the hull and the axes.
bool hull_contains(const std::vector<std::array<double, 2>>& hull, std::array<double, 2> p,
                   double tol = 1e-9);

}  // namespace macfcs
