#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sbs/random.hpp"

namespace sbs::approx {

/// Multivariate normal with a cached Cholesky factor. Immutable once built.
class GaussianApprox {
 public:
  GaussianApprox() = default;
  /// Throws std::invalid_argument if `covariance` is not symmetric positive definite.
  GaussianApprox(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  static GaussianApprox isotropic(Eigen::Index dim, double variance);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_l_; }
  double log_det() const { return log_det_; }

  double log_density(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample(Rng& rng) const;

  /// Marginal over a contiguous block of coordinates.
  GaussianApprox marginal(Eigen::Index start, Eigen::Index size) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_l_;
  double log_det_ = 0.0;
};

/// Perturbations used to stress the bridge with deliberately poor starts.
struct Perturbation {
  enum class Kind { kNone, kDiagShrink, kDiagInflate, kShift };
  Kind kind = Kind::kNone;
  double factor = 1.0;  // c
  double shift = 0.0;   // s (kShift only)

  static Perturbation diag_shrink(double c) { return {Kind::kDiagShrink, c, 0.0}; }
  static Perturbation diag_inflate(double c) { return {Kind::kDiagInflate, c, 0.0}; }
  static Perturbation shifted(double s, double c) { return {Kind::kShift, c, s}; }
};

/// diag_shrink(c): N(mu, diag(S)/c); diag_inflate(c): N(mu, diag(S)*c);
/// shift(s, c): N(mu + s, diag(S)/c). kNone returns the input unchanged.
GaussianApprox perturb_approx(const GaussianApprox& approx, const Perturbation& variant);

}  // namespace sbs::approx
