#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/symmetrized.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::approx {

/// Dir(d) prior on class proportions, Beta(a, b) on every success probability.
struct LcaHyper {
  double d = 2.0;
  double a = 2.0;
  double b = 2.0;
};

/// Mean-field posterior q(Z) q(gamma) q(pi) for latent class analysis.
class LcaVbApprox {
 public:
  using State = models::LcaState;

  LcaVbApprox() = default;
  /// `log_tau` is n x g; each row is log-normalized on construction.
  LcaVbApprox(Eigen::VectorXd dirichlet, Eigen::MatrixXd alpha, Eigen::MatrixXd beta,
              Eigen::MatrixXd log_tau);

  int group_count() const { return static_cast<int>(dirichlet_.size()); }
  Eigen::Index n() const { return log_tau_.rows(); }
  Eigen::Index q() const { return alpha_.cols(); }

  const Eigen::VectorXd& dirichlet_params() const { return dirichlet_; }
  const Eigen::MatrixXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& beta() const { return beta_; }
  const Eigen::MatrixXd& log_assign_probs() const { return log_tau_; }
  Eigen::MatrixXd assign_probs() const { return log_tau_.array().exp(); }

  /// Density with state label k read as component sigma[k].
  double log_density_permuted(const State& s, const Permutation& sigma) const;
  State sample_permuted(const Permutation& sigma, Rng& rng) const;

  /// Unpermuted density; ignores s.sigma.
  double log_density(const State& s) const;
  State sample(Rng& rng) const;

  double elbo = 0.0;
  std::vector<double> elbo_trace;

 private:
  Eigen::VectorXd dirichlet_;
  Eigen::MatrixXd alpha_;
  Eigen::MatrixXd beta_;
  Eigen::MatrixXd log_tau_;
  double log_norm_ = 0.0;  // Dirichlet and Beta normalizers; invariant under relabeling
};

using LcaSymmetrized = Symmetrized<LcaVbApprox>;

struct LcaVbOptions {
  int restarts = 5;
  double tolerance = 1e-6;  // absolute ELBO change
  int max_iterations = 500;
  std::uint64_t seed = 1;
};

/// Coordinate-ascent VB from random soft assignments; the restart with the
/// largest ELBO is returned. `y` is an n x q matrix of 0/1 entries.
LcaVbApprox fit_vb_lca(const Eigen::MatrixXd& y, int g, const LcaHyper& hyper,
                       const LcaVbOptions& options = {});

/// ELBO of the mean-field family at the given parameters.
double lca_elbo(const Eigen::MatrixXd& y, const LcaHyper& hyper, const LcaVbApprox& q);

inline LcaSymmetrized symmetrize(const LcaVbApprox& approx) { return LcaSymmetrized(approx); }

}  // namespace sbs::approx
