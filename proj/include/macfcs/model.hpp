#pragma once

// Physical channel parameters and the entropic description of the sources.
//
// Nodes are indexed from 0. With node_count() == T the sources are nodes
// 0 .. T-2 and the destination is node T-1; for the three-node network the
// sources are 0 and 1 and the destination is 2.

#include <array>
#include <cstddef>
#include <vector>

namespace macfcs {

class Topology {
 public:
  // Validates on construction (InvalidArgument): at least three nodes, a
  // square symmetric distance matrix with positive off-diagonal entries,
  // kappa > 0, eta > 0, one positive noise variance per node, and one
  // nonnegative power limit per source node.
  Topology(std::vector<std::vector<double>> distances, double kappa, double eta,
           std::vector<double> noise, std::vector<double> power_limits);

  // Pairwise Euclidean distances between planar node positions.
  static Topology from_coordinates(const std::vector<std::array<double, 2>>& positions,
                                   double kappa, double eta, std::vector<double> noise,
                                   std::vector<double> power_limits);

  // Three nodes: sources 0 and 1 at distance d12 apart, each at distance
  // d_to_dest from the destination. Unit noise everywhere.
  static Topology symmetric(double d12, double d_to_dest, double power, double kappa = 1.0,
                            double eta = 2.0);

  std::size_t node_count() const { return distances_.size(); }
  std::size_t destination() const { return node_count() - 1; }
  double distance(std::size_t i, std::size_t t) const { return distances_.at(i).at(t); }
  const std::vector<std::vector<double>>& distances() const { return distances_; }
  double kappa() const { return kappa_; }
  double eta() const { return eta_; }
  double noise(std::size_t t) const { return noise_.at(t); }
  const std::vector<double>& noise() const { return noise_; }
  double power_limit(std::size_t i) const { return power_limits_.at(i); }
  const std::vector<double>& power_limits() const { return power_limits_; }

  Topology with_power_limits(std::vector<double> limits) const;
  Topology with_distance(std::size_t i, std::size_t t, double d) const;

 private:
  std::vector<std::vector<double>> distances_;
  double kappa_;
  double eta_;
  std::vector<double> noise_;
  std::vector<double> power_limits_;
};

// Power gain kappa * d_it^-eta of the link from node i to node t.
// Throws SelfLink when i == t, InvalidArgument on an out-of-range index.
double gain(const Topology& topology, std::size_t i, std::size_t t);

// Entropic summary of the correlated sources S1 = (I, J), S2 = (I, K).
struct SourceTriple {
  double h1_given_2 = 0.0;  // H(S1|S2) = H(J)
  double h2_given_1 = 0.0;  // H(S2|S1) = H(K)
  double common = 0.0;      // I(S1;S2) = H(I)

  double h1() const { return h1_given_2 + common; }
  double h2() const { return h2_given_1 + common; }
  double joint() const { return h1_given_2 + h2_given_1 + common; }
  bool is_zero() const { return h1_given_2 == 0.0 && h2_given_1 == 0.0 && common == 0.0; }

  // Throws InvalidArgument on a negative or non-finite entry.
  void validate() const;
};

// p(s1, s2); rows index S1, columns index S2.
struct JointPMF {
  std::vector<std::vector<double>> probabilities;
};

// Throws InvalidPMF on a ragged or empty table, a negative entry, or total
// mass differing from 1 by more than 1e-12.
SourceTriple triple_from_pmf(const JointPMF& pmf);

struct SlepianWolfCheck {
  bool feasible = false;
  double slack_r1 = 0.0;   // r1 - H(S1|S2)
  double slack_r2 = 0.0;   // r2 - H(S2|S1)
  double slack_sum = 0.0;  // r1 + r2 - H(S1,S2)
};

// Lossless distributed source coding region (non-strict inequalities).
SlepianWolfCheck slepian_wolf_feasible(const SourceTriple& triple, double r1, double r2);

}  // namespace macfcs
