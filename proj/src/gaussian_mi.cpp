#include "macfcs/gaussian_mi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <unordered_set>

#include "macfcs/errors.hpp"

namespace macfcs {

namespace {

constexpr double kVarianceFloor = 1e-12;

// log2(2 pi e)
const double kLog2TwoPiE = std::log2(2.0 * std::numbers::pi * std::numbers::e);

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Cholesky factor of the covariance of a growing, ordered list of variables,
// built by orthonormalizing their coefficient rows (Sigma = A A^T = L L^T with
// L = A Q). Each pushed variable either contributes its conditional variance
// given everything kept so far, or is skipped as a deterministic function of
// it. Working on the rows rather than on Sigma keeps tiny residuals exact.
class SequentialFactor {
 public:
  explicit SequentialFactor(const GaussianSystem& system) : system_(&system) {}

  // Returns the residual variance of v given the kept variables, or nullopt if
  // v is (numerically) determined by them.
  std::optional<double> push(VarId v) {
    const auto a = system_->coefficients(v);
    const double total = dot(a, a);
    if (total < kVarianceFloor) return std::nullopt;

    std::vector<double> r(a.begin(), a.end());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) {
        const double c = dot(r, q);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * q[i];
      }
    }
    const double residual = dot(r, r);
    if (residual <= kVarianceFloor * (1.0 + total)) return std::nullopt;

    const double norm = std::sqrt(residual);
    for (auto& x : r) x /= norm;
    basis_.push_back(std::move(r));
    return residual;
  }

 private:
  const GaussianSystem* system_;
  std::vector<std::vector<double>> basis_;
};

std::vector<VarId> dedupe(std::span<const VarId> ids) {
  std::vector<VarId> out;
  out.reserve(ids.size());
  for (VarId v : ids) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

bool intersects(std::span<const VarId> a, std::span<const VarId> b) {
  for (VarId x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  }
  return false;
}

}  // namespace

GaussianSystem::GaussianSystem(std::size_t latent_count) : latent_count_(latent_count) {
  if (latent_count == 0) throw InvalidArgument("GaussianSystem needs at least one latent");
}

VarId GaussianSystem::add(std::string name, std::vector<double> coefficients) {
  if (coefficients.size() != latent_count_) {
    throw InvalidArgument("variable '" + name + "' has " +
                          std::to_string(coefficients.size()) + " coefficients, expected " +
                          std::to_string(latent_count_));
  }
  if (contains(name)) throw InvalidArgument("duplicate variable '" + name + "'");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw InvalidArgument("variable '" + name + "' has a non-finite coefficient");
  }
  names_.push_back(std::move(name));
  coeffs_.insert(coeffs_.end(), coefficients.begin(), coefficients.end());
  return names_.size() - 1;
}

bool GaussianSystem::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

VarId GaussianSystem::id(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw UnknownVariable(std::string(name));
  return static_cast<VarId>(it - names_.begin());
}

std::vector<VarId> GaussianSystem::ids(const VariableSet& names) const {
  std::vector<VarId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(id(n));
  return dedupe(out);
}

std::span<const double> GaussianSystem::coefficients(VarId v) const {
  if (v >= size()) throw InvalidArgument("variable id out of range");
  return {coeffs_.data() + v * latent_count_, latent_count_};
}

double GaussianSystem::variance(VarId v) const {
  const auto a = coefficients(v);
  return dot(a, a);
}

Eigen::MatrixXd covariance(const GaussianSystem& system, const VariableSet& vars) {
  const auto ids = system.ids(vars);
  const auto k = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd a(k, static_cast<Eigen::Index>(system.latent_count()));
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto row = system.coefficients(ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  Eigen::MatrixXd sigma = a * a.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

double diff_entropy(const GaussianSystem& system, std::span<const VarId> vars) {
  SequentialFactor factor(system);
  double h = 0.0;
  for (VarId v : dedupe(vars)) {
    if (system.variance(v) < kVarianceFloor) continue;
    const auto residual = factor.push(v);
    if (!residual) {
      throw SingularCovariance("covariance is singular: '" + system.name(v) +
                               "' is a linear function of the other variables");
    }
    h += 0.5 * (kLog2TwoPiE + std::log2(*residual));
  }
  return h;
}

double diff_entropy(const GaussianSystem& system, const VariableSet& vars) {
  const auto ids = system.ids(vars);
  return diff_entropy(system, std::span<const VarId>(ids));
}

double mutual_info(const GaussianSystem& system, std::span<const VarId> a_in,
                   std::span<const VarId> b_in, std::span<const VarId> cond_in) {
  const auto a = dedupe(a_in);
  const auto b = dedupe(b_in);
  const auto cond = dedupe(cond_in);
  if (intersects(a, b) || intersects(a, cond) || intersects(b, cond)) {
    throw OverlappingSets("mutual information arguments must be disjoint");
  }
  if (a.empty() || b.empty()) return 0.0;

  // I(A;B|C) = h(B|C) - h(B|A,C); the 2 pi e terms cancel member by member.
  SequentialFactor given_c(system);
  for (VarId v : cond) given_c.push(v);
  SequentialFactor given_ac = given_c;
  for (VarId v : a) given_ac.push(v);

  double log_ratio = 0.0;
  for (VarId v : b) {
    const auto wide = given_c.push(v);
    const auto narrow = given_ac.push(v);
    if (wide && !narrow) {
      throw SingularCovariance("'" + system.name(v) +
                               "' is a noiseless function of the other arguments; "
                               "mutual information is unbounded");
    }
    if (wide && narrow) log_ratio += std::log2(*wide) - std::log2(*narrow);
  }
  return std::max(0.0, 0.5 * log_ratio);
}

double mutual_info(const GaussianSystem& system, const VariableSet& a, const VariableSet& b,
                   const VariableSet& cond) {
  const auto ia = system.ids(a);
  const auto ib = system.ids(b);
  const auto ic = system.ids(cond);
  return mutual_info(system, std::span<const VarId>(ia), std::span<const VarId>(ib),
                     std::span<const VarId>(ic));
}

}  // namespace macfcs
