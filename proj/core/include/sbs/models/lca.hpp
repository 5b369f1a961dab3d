#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/lca_vb.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::models {

using approx::LcaHyper;

/// log l(Y | Z, gamma): product-Bernoulli terms only.
double log_lik_lca(const LcaState& s, const Eigen::MatrixXd& y);
/// log p(Z | pi) + log Dir(pi; d) + sum log Beta(gamma; a, b).
double log_prior_lca(const LcaState& s, const LcaHyper& hyper);
double log_joint_lca(const LcaState& s, const Eigen::MatrixXd& y, const LcaHyper& hyper);

/// Test functionals: |pi_1 - pi_2| and pi_1.
inline double phi_pi_gap(const LcaState& s) { return std::abs(s.pi(0) - s.pi(1)); }
inline double phi_pi1(const LcaState& s) { return s.pi(0); }

/// LCA on the bridge from a VB fit (plain or symmetrized) to the posterior.
///
/// With symmetrization the permutation sigma is part of the state. The
/// approximation factor is q_sigma / g! and the prior gains the uniform
/// 1 / g! on sigma, so the ratio alpha does not depend on the labeling and the
/// evidence of the extended model equals that of the original one.
///
/// Tempered conditionals, with state label k read as component sigma(k) and
/// n_k, s_kj the class counts and success counts:
///   Z_i      ∝ tau_{i sigma(k)}^(1-rho) [pi_k prod_j Bern(y_ij; gamma_kj)]^rho
///   gamma_kj ~ Beta((1-rho) a~_{sigma(k)j} + rho (a + s_kj),
///                   (1-rho) b~_{sigma(k)j} + rho (b + n_k - s_kj))
///   pi       ~ Dir((1-rho) d~_{sigma(k)} + rho (d + n_k))
///   sigma    ∝ q_sigma(Z, gamma, pi)^(1-rho)
class LcaTarget {
 public:
  using State = LcaState;

  LcaTarget(std::shared_ptr<const Eigen::MatrixXd> y, LcaHyper hyper, approx::LcaVbApprox vb,
            bool symmetrized);

  double log_prior(const State& s) const;
  double log_lik(const State& s) const { return log_lik_lca(s, *y_); }
  double log_approx(const State& s) const;
  State sample_approx(Rng& rng) const;

  /// One Gibbs sweep: sigma (symmetrized only), Z, gamma, pi.
  void move(State& s, double rho, Rng& rng) const;

  void update_sigma(State& s, double rho, Rng& rng) const;
  void update_z(State& s, double rho, Rng& rng) const;
  void update_gamma(State& s, double rho, Rng& rng) const;
  void update_pi(State& s, double rho, Rng& rng) const;

  bool symmetrized() const { return symmetrized_; }
  int group_count() const { return sym_.group_count(); }
  const approx::LcaSymmetrized& approximation() const { return sym_; }
  const LcaHyper& hyper() const { return hyper_; }

 private:
  std::shared_ptr<const Eigen::MatrixXd> y_;
  LcaHyper hyper_;
  approx::LcaSymmetrized sym_;
  bool symmetrized_;
};

}  // namespace sbs::models
