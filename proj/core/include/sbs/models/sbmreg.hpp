#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/sbmreg_vb.hpp"
#include "sbs/models/edge_data.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::models {

using approx::SbmRegPriors;

/// Sum over dyads of the Bernoulli log-mass with logit alpha_{z_i z_j} + x_ij' beta.
double log_lik_sbmreg(const SbmRegState& s, const EdgeData& data);
/// log p(Z | pi) + log Dir(pi; d) + Gaussian log-priors on alpha_kl (k <= l) and beta.
double log_prior_sbmreg(const SbmRegState& s, const SbmRegPriors& priors);
double log_joint_sbmreg(const SbmRegState& s, const EdgeData& data, const SbmRegPriors& priors);

/// SBM with dyad covariates on the bridge from its VB fit to the posterior.
///
/// Sweep: sigma (symmetrized only), Gibbs for each z_i, Gibbs for pi, then
/// random-walk Metropolis on the alpha block and on the beta block. Proposal
/// covariances are the matching VB blocks (relabeled through sigma for alpha)
/// scaled by c in {1, 0.1, 10}, one scale picked uniformly per step.
class SbmRegTarget {
 public:
  using State = SbmRegState;
  static constexpr std::array<double, 3> kProposalScales{1.0, 0.1, 10.0};

  SbmRegTarget(std::shared_ptr<const EdgeData> data, SbmRegPriors priors,
               approx::SbmRegVbApprox vb, bool symmetrized);

  double log_prior(const State& s) const;
  double log_lik(const State& s) const { return log_lik_sbmreg(s, *data_); }
  double log_approx(const State& s) const;
  State sample_approx(Rng& rng) const;

  void move(State& s, double rho, Rng& rng) const;

  void update_sigma(State& s, double rho, Rng& rng) const;
  void update_z(State& s, double rho, Rng& rng) const;
  void update_pi(State& s, double rho, Rng& rng) const;
  bool update_alpha(State& s, double rho, Rng& rng) const;
  bool update_beta(State& s, double rho, Rng& rng) const;

  bool symmetrized() const { return symmetrized_; }
  int group_count() const { return sym_.group_count(); }
  const approx::SbmRegSymmetrized& approximation() const { return sym_; }
  const EdgeData& data() const { return *data_; }

 private:
  double coef_log_target(const State& s, double rho) const;
  std::size_t perm_slot(const Permutation& sigma) const;

  std::shared_ptr<const EdgeData> data_;
  SbmRegPriors priors_;
  approx::SbmRegSymmetrized sym_;
  bool symmetrized_;
  std::vector<Eigen::MatrixXd> alpha_chol_;  // per permutation, state ordering
  Eigen::MatrixXd beta_chol_;
};

}  // namespace sbs::models
