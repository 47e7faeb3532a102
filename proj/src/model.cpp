#include "macfcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "macfcs/errors.hpp"

namespace macfcs {

namespace {

constexpr double kMassTolerance = 1e-12;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

}  // namespace

Topology::Topology(std::vector<std::vector<double>> distances, double kappa, double eta,
                   std::vector<double> noise, std::vector<double> power_limits)
    : distances_(std::move(distances)),
      kappa_(kappa),
      eta_(eta),
      noise_(std::move(noise)),
      power_limits_(std::move(power_limits)) {
  const std::size_t n = distances_.size();
  if (n < 3) throw InvalidArgument("topology needs at least 3 nodes");
  for (std::size_t i = 0; i < n; ++i) {
    if (distances_[i].size() != n) throw InvalidArgument("distance matrix must be square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < n; ++t) {
      if (i == t) continue;
      const double d = distances_[i][t];
      if (!positive_finite(d)) {
        throw InvalidArgument("distance d(" + std::to_string(i) + "," + std::to_string(t) +
                              ") must be positive");
      }
      if (d != distances_[t][i]) throw InvalidArgument("distance matrix must be symmetric");
    }
  }
  if (!positive_finite(kappa_)) throw InvalidArgument("kappa must be positive");
  if (!positive_finite(eta_)) throw InvalidArgument("eta must be positive");
  if (noise_.size() != n) throw InvalidArgument("noise needs one variance per node");
  for (double v : noise_) {
    if (!positive_finite(v)) throw InvalidArgument("noise variances must be positive");
  }
  if (power_limits_.size() != n - 1) {
    throw InvalidArgument("power_limits needs one entry per source node");
  }
  for (double p : power_limits_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidArgument("power limits must be nonnegative");
  }
}

Topology Topology::from_coordinates(const std::vector<std::array<double, 2>>& positions,
                                    double kappa, double eta, std::vector<double> noise,
                                    std::vector<double> power_limits) {
  const std::size_t n = positions.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = i + 1; t < n; ++t) {
      d[i][t] = d[t][i] = std::hypot(positions[i][0] - positions[t][0],
                                     positions[i][1] - positions[t][1]);
    }
  }
  return Topology(std::move(d), kappa, eta, std::move(noise), std::move(power_limits));
}

Topology Topology::symmetric(double d12, double d_to_dest, double power, double kappa,
                             double eta) {
  return Topology({{0.0, d12, d_to_dest}, {d12, 0.0, d_to_dest}, {d_to_dest, d_to_dest, 0.0}},
                  kappa, eta, {1.0, 1.0, 1.0}, {power, power});
}

Topology Topology::with_power_limits(std::vector<double> limits) const {
  return Topology(distances_, kappa_, eta_, noise_, std::move(limits));
}

Topology Topology::with_distance(std::size_t i, std::size_t t, double d) const {
  auto dist = distances_;
  dist.at(i).at(t) = d;
  dist.at(t).at(i) = d;
  return Topology(std::move(dist), kappa_, eta_, noise_, power_limits_);
}

double gain(const Topology& topology, std::size_t i, std::size_t t) {
  if (i >= topology.node_count() || t >= topology.node_count()) {
    throw InvalidArgument("node index out of range");
  }
  if (i == t) throw SelfLink("no channel from node " + std::to_string(i) + " to itself");
  return topology.kappa() * std::pow(topology.distance(i, t), -topology.eta());
}

void SourceTriple::validate() const {
  for (double x : {h1_given_2, h2_given_1, common}) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidArgument("source entropies must be nonnegative");
  }
}

SourceTriple triple_from_pmf(const JointPMF& pmf) {
  const auto& p = pmf.probabilities;
  if (p.empty() || p.front().empty()) throw InvalidPMF("pmf is empty");
  const std::size_t cols = p.front().size();
  std::vector<double> row_sums(p.size(), 0.0);
  std::vector<double> col_sums(cols, 0.0);
  std::vector<double> cells;
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != cols) throw InvalidPMF("pmf rows have different lengths");
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = p[i][j];
      if (!std::isfinite(x) || x < 0.0) throw InvalidPMF("pmf has a negative entry");
      row_sums[i] += x;
      col_sums[j] += x;
      cells.push_back(x);
      mass += x;
    }
  }
  if (std::abs(mass - 1.0) > kMassTolerance) throw InvalidPMF("pmf mass differs from 1");

  const double h12 = entropy_bits(cells);
  const double h1 = entropy_bits(row_sums);
  const double h2 = entropy_bits(col_sums);
  SourceTriple t;
  t.h1_given_2 = std::max(0.0, h12 - h2);
  t.h2_given_1 = std::max(0.0, h12 - h1);
  t.common = std::max(0.0, h1 + h2 - h12);
  return t;
}

SlepianWolfCheck slepian_wolf_feasible(const SourceTriple& triple, double r1, double r2) {
  SlepianWolfCheck c;
  c.slack_r1 = r1 - triple.h1_given_2;
  c.slack_r2 = r2 - triple.h2_given_1;
  c.slack_sum = r1 + r2 - triple.joint();
  c.feasible = c.slack_r1 >= 0.0 && c.slack_r2 >= 0.0 && c.slack_sum >= 0.0;
  return c;
}

}  // namespace macfcs
