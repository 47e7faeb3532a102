#pragma once

// Gaussian signal models and constraint evaluators for the three-node
// multiple access channel with feedback and correlated sources.
//
//   df       decode-forward at the sources: each source decodes the other's
//            fresh information, then both send cooperative codewords W0
//            (common), W1, W2 (old private parts) coherently.
//   cf       separate source coding plus compress-forward: each source
//            quantizes what it overhears (Ytilde = Y + compression noise) and
//            forwards it on carrier U while sending fresh data on V.
//   maccc    separate source coding plus a plain multiple access code.
//   tdma_df  the half-duplex three-phase special case of df.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "macfcs/gaussian_mi.hpp"
#include "macfcs/model.hpp"

namespace macfcs {

enum class Strategy { kDecodeForward, kCompressForward, kMaccc, kTdmaDecodeForward };

std::string_view to_string(Strategy s);
// Accepts "df", "cf", "maccc", "tdma_df". Throws InvalidArgument.
Strategy parse_strategy(std::string_view name);

// Power fractions of each source over (W0, W1, W2, fresh private signal).
struct DfSplit {
  std::array<double, 4> alpha{};  // node 1
  std::array<double, 4> beta{};   // node 2

  static constexpr std::size_t kW0 = 0;
  static constexpr std::size_t kW1 = 1;
  static constexpr std::size_t kW2 = 2;
  static constexpr std::size_t kFresh = 3;
};

struct CfSplit {
  double pu1 = 0.0;  // power on the compressed-information carrier U1
  double pv1 = 0.0;  // power on the new-information carrier V1
  double pu2 = 0.0;
  double pv2 = 0.0;
  double ntilde1 = 1.0;  // compression noise variances, > 0
  double ntilde2 = 1.0;
};

struct MacccPowers {
  double p1 = 0.0;
  double p2 = 0.0;
};

// One time-sharing component of the half-duplex schedule: its weight, the
// per-node power while the phase is active, and the split used in it.
struct TdmaPhase {
  double weight = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  DfSplit split;
};

// Phase 0: node 1 alone sends fresh data; phase 1: node 2 alone; phase 2:
// both send deterministic functions of (W0, W1, W2).
struct TimeShareMixture {
  std::vector<TdmaPhase> components;
};

struct TdmaSchedule {
  TimeShareMixture mixture;
  bool destination_decodes_all_phases = true;
};

using StrategyParams = std::variant<MacccPowers, DfSplit, CfSplit, TdmaSchedule>;

// A strategy with its free parameters and the per-node power budget they
// were chosen under.
struct StrategyPoint {
  Strategy strategy = Strategy::kMaccc;
  std::array<double, 2> budget{};
  StrategyParams params;
};

struct ConstraintEntry {
  std::string label;
  double lhs = 0.0;  // required information (bits)
  double rhs = 0.0;  // available information (bits)
  bool strict = true;
  // A demand row (lhs is a source entropy) with lhs == 0 holds trivially.
  bool demand = true;

  double slack() const { return rhs - lhs; }
  bool vacuous() const { return demand && lhs == 0.0; }
  bool satisfied() const;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;

  bool feasible() const;
  double min_slack() const;
  // Smallest slack over the rows that are not vacuous; +inf when none.
  double margin() const;
  const ConstraintEntry& at(std::string_view label) const;
};

// Built models keep their GaussianSystem together with the ids of the named
// variables, so evaluators do not look names up repeatedly.
struct DfModel {
  GaussianSystem system;
  VarId w0, w1, w2, x1, x2, y1, y2, y3;
};

struct CfModel {
  GaussianSystem system;
  VarId u1, u2, x1, x2, y1, y2, y3, yt1, yt2;
};

// Node 1 sends X1 = sqrt(a0 P1) W0 + sqrt(a1 P1) W1 + sqrt(a2 P1) W2 +
// sqrt(av P1) V1 (X2 likewise with beta and P2), where W0..W2 are latents
// shared by both nodes. Received signals follow the path-loss model; the
// sources do not hear their own transmission. Throws SplitOutOfBudget.
DfModel df_model(const Topology& topology, const DfSplit& split);
GaussianSystem df_build(const Topology& topology, const DfSplit& split);

// Xi = sqrt(pu_i) Ui + sqrt(pv_i) Vi and Ytilde_i = Y_i + Zhat_i with
// var(Zhat_i) = ntilde_i. Throws SplitOutOfBudget, NonpositiveCompressionNoise.
CfModel cf_model(const Topology& topology, const CfSplit& split);
GaussianSystem cf_build(const Topology& topology, const CfSplit& split);

// Mutual-information terms appearing on the right of the decode-forward
// conditions. Everything except the two inter-source terms is observed at
// the destination.
struct DfTerms {
  double x12_y3 = 0.0;           // I(X1,X2;Y3)
  double x1_y2 = 0.0;            // I(X1;Y2|W0,W1,W2,X2)
  double x2_y1 = 0.0;            // I(X2;Y1|W0,W1,W2,X1)
  double w1_y3 = 0.0;            // I(W1;Y3|W0,W2)
  double w2_y3 = 0.0;            // I(W2;Y3|W0,W1)
  double x1_y3 = 0.0;            // I(X1;Y3|W0,W1,W2,X2)
  double x2_y3 = 0.0;            // I(X2;Y3|W0,W1,W2,X1)
  double w0_y3 = 0.0;            // I(W0;Y3|W1,W2)
  double w01_y3 = 0.0;           // I(W0,W1;Y3|W2)
  double w02_y3 = 0.0;           // I(W0,W2;Y3|W1)
  double w12_y3 = 0.0;           // I(W1,W2;Y3|W0)
  double x12_y3_given_w = 0.0;   // I(X1,X2;Y3|W0,W1,W2)

  DfTerms& operator+=(const DfTerms& o);
  DfTerms scaled(double weight, bool keep_destination_terms) const;
};

DfTerms df_terms(const Topology& topology, const DfSplit& split);
ConstraintReport df_report(const SourceTriple& triple, const DfTerms& terms);

// Labels DF-1, DF-2a, DF-2b, DF-3a, DF-3b, DF-4 .. DF-7 (strict).
ConstraintReport df_constraints(const Topology& topology, const SourceTriple& triple,
                                const DfSplit& split);

// Labels CF-R1, CF-R2, CF-R12 (rates) and CF-F1, CF-F2, CF-F3 (compression).
ConstraintReport cf_constraints(const Topology& topology, const SourceTriple& triple,
                                const CfSplit& split);

// Only the compression rows CF-F1..CF-F3.
ConstraintReport cf_compression_constraints(const Topology& topology, const CfSplit& split);

inline constexpr double kCfNoiseFloor = 1e-9;
inline constexpr double kCfNoiseCap = 1e12;

// Smallest common compression noise ntilde1 = ntilde2 in [kCfNoiseFloor,
// kCfNoiseCap] for which CF-F1..F3 hold, bisected to an absolute tolerance.
// Returns kCfNoiseFloor when already feasible there and nullopt when even the
// cap is infeasible. Throws InvalidTolerance when tol <= 0.
std::optional<std::pair<double, double>> cf_min_noise(const Topology& topology, double pu1,
                                                      double pv1, double pu2, double pv2,
                                                      double tol);

// Labels MAC-1..MAC-3 (non-strict). Requires 0 <= p_i <= P_i.
ConstraintReport maccc_constraints(const Topology& topology, const SourceTriple& triple,
                                   double p1, double p2);

// Decode-forward conditions with every information term replaced by its
// weighted average over the three phases. Without destination decoding in
// all phases, the destination terms of phases 0 and 1 are dropped.
// Throws BadPhaseStructure, SplitOutOfBudget.
ConstraintReport tdma_df_constraints(const Topology& topology, const SourceTriple& triple,
                                     const TimeShareMixture& mixture,
                                     bool destination_decodes_all_phases);

void validate_tdma(const Topology& topology, const TimeShareMixture& mixture);

// Dispatches on the point's strategy, using point.budget as the power limits.
ConstraintReport evaluate(const Topology& topology, const SourceTriple& triple,
                          const StrategyPoint& point);

}  // namespace macfcs
