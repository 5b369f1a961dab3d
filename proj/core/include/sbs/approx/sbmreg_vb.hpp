#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/gaussian.hpp"
#include "sbs/approx/symmetrized.hpp"
#include "sbs/models/edge_data.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::approx {

/// Independent N(0, alpha_var) on each alpha_kl (k <= l), N(0, beta_var I) on
/// beta, Dir(d) on pi.
struct SbmRegPriors {
  double alpha_var = 4.0;
  double beta_var = 1.0;
  double d = 2.0;
};

/// Position of alpha_kl (any order of k, l) in the packed upper triangle.
int block_index(int k, int l, int g);
inline int block_count(int g) { return g * (g + 1) / 2; }

/// q(Z) q(alpha, beta) q(pi): block effects and regression coefficients share
/// one Gaussian factor, stacked as u = (packed alpha, beta).
class SbmRegVbApprox {
 public:
  using State = models::SbmRegState;

  SbmRegVbApprox() = default;
  SbmRegVbApprox(Eigen::MatrixXd log_tau, GaussianApprox coef, Eigen::VectorXd dirichlet);

  int group_count() const { return static_cast<int>(dirichlet_.size()); }
  Eigen::Index n() const { return log_tau_.rows(); }
  Eigen::Index p() const { return coef_.dim() - block_count(group_count()); }

  const Eigen::MatrixXd& log_assign_probs() const { return log_tau_; }
  Eigen::MatrixXd assign_probs() const { return log_tau_.array().exp(); }
  const GaussianApprox& coef_gauss() const { return coef_; }
  GaussianApprox alpha_gauss() const { return coef_.marginal(0, block_count(group_count())); }
  GaussianApprox beta_gauss() const { return coef_.marginal(block_count(group_count()), p()); }
  const Eigen::VectorXd& pi_dirichlet() const { return dirichlet_; }

  /// Packs the state's (alpha, beta) into approximation ordering: state block
  /// (k, l) lands at component block (sigma[k], sigma[l]).
  Eigen::VectorXd pack(const State& s, const Permutation& sigma) const;

  double log_density_permuted(const State& s, const Permutation& sigma) const;
  State sample_permuted(const Permutation& sigma, Rng& rng) const;
  double log_density(const State& s) const;
  State sample(Rng& rng) const;

  double elbo = 0.0;
  std::vector<double> elbo_trace;

 private:
  Eigen::MatrixXd log_tau_;
  GaussianApprox coef_;
  Eigen::VectorXd dirichlet_;
};

using SbmRegSymmetrized = Symmetrized<SbmRegVbApprox>;

struct SbmRegVbOptions {
  int random_restarts = 3;  // in addition to the spectral start
  double tolerance = 1e-8;  // relative ELBO change
  int max_iterations = 500;
  std::uint64_t seed = 1;
};

/// Mean-field VB with the local quadratic logistic bound (one bound parameter
/// per dyad and block pair). The first start is a spectral clustering of the
/// adjacency matrix; the best ELBO over all starts is kept.
SbmRegVbApprox fit_vb_sbmreg(const models::EdgeData& data, int g, const SbmRegPriors& priors,
                             const SbmRegVbOptions& options = {});

}  // namespace sbs::approx
