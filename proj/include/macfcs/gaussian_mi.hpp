#pragma once

// Differential entropy and conditional mutual information of jointly Gaussian
// scalar variables. Every variable is a linear combination of a shared basis
// of independent, zero-mean, unit-variance latents, so the covariance of any
// subset is A * A^T over the selected coefficient rows. Variables that share
// a latent (a common codeword sent by two transmitters, for instance) pick up
// their cross-covariance automatically.
//
// All information quantities are in bits.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace macfcs {

using VarId = std::size_t;

// Ordered set of variable names. Duplicates are ignored when resolved.
using VariableSet = std::vector<std::string>;

class GaussianSystem {
 public:
  explicit GaussianSystem(std::size_t latent_count);

  // Adds a named variable. Throws InvalidArgument on a duplicate name or a
  // coefficient vector whose length differs from latent_count().
  VarId add(std::string name, std::vector<double> coefficients);

  std::size_t latent_count() const { return latent_count_; }
  std::size_t size() const { return names_.size(); }

  bool contains(std::string_view name) const;
  // Throws UnknownVariable.
  VarId id(std::string_view name) const;
  std::vector<VarId> ids(const VariableSet& names) const;

  const std::string& name(VarId v) const { return names_.at(v); }
  std::span<const double> coefficients(VarId v) const;
  double variance(VarId v) const;

 private:
  std::size_t latent_count_;
  std::vector<std::string> names_;
  std::vector<double> coeffs_;  // row-major, one row per variable
};

// Sigma = A A^T over the selected variables, exactly symmetric.
Eigen::MatrixXd covariance(const GaussianSystem& system, const VariableSet& vars);

// h(V) = 1/2 log2((2 pi e)^k det Sigma_V). Variables with variance below
// 1e-12 are treated as the constant 0 and dropped; h of the empty set is 0.
// Throws SingularCovariance when the remaining covariance is singular.
double diff_entropy(const GaussianSystem& system, const VariableSet& vars);
double diff_entropy(const GaussianSystem& system, std::span<const VarId> vars);

// I(A;B|C) >= 0. A and B must be disjoint from each other and from C
// (OverlappingSets). Members of a set that are deterministic linear functions
// of the conditioning (or of earlier members of the same set) carry no
// information and are skipped. If B is a noiseless function of (A, C) while
// not of C alone the information is unbounded and SingularCovariance is
// thrown.
double mutual_info(const GaussianSystem& system, const VariableSet& a,
                   const VariableSet& b, const VariableSet& cond = {});
double mutual_info(const GaussianSystem& system, std::span<const VarId> a,
                   std::span<const VarId> b, std::span<const VarId> cond = {});

}  // namespace macfcs
