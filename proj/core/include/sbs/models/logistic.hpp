#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/gaussian.hpp"
#include "sbs/random.hpp"

namespace sbs::models {

struct LogisticData {
  Eigen::MatrixXd x;  // n x p design
  Eigen::VectorXd y;  // 0/1 responses
  std::vector<std::string> names;  // covariate names, length p

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

double log_lik_logistic(const Eigen::VectorXd& theta, const LogisticData& data);
double log_prior_logistic(const Eigen::VectorXd& theta, double prior_var);
/// Log-likelihood plus the N(0, prior_var I) log-prior.
double log_joint_logistic(const Eigen::VectorXd& theta, const LogisticData& data,
                          double prior_var);

/// Logistic regression on the bridge from `reference` to the posterior.
/// The kernel is a random-walk Metropolis step whose proposal is an equal
/// mixture of N(theta, c * proposal_cov) for c in {1, 0.1, 10}.
class LogisticTarget {
 public:
  using State = Eigen::VectorXd;
  static constexpr std::array<double, 3> kProposalScales{1.0, 0.1, 10.0};

  LogisticTarget(std::shared_ptr<const LogisticData> data, double prior_var,
                 approx::GaussianApprox reference, const Eigen::MatrixXd& proposal_cov);

  double log_prior(const State& theta) const { return log_prior_logistic(theta, prior_var_); }
  double log_lik(const State& theta) const { return log_lik_logistic(theta, *data_); }
  double log_approx(const State& theta) const { return reference_.log_density(theta); }
  State sample_approx(Rng& rng) const { return reference_.sample(rng); }

  /// (1 - rho) log reference + rho (log lik + log prior).
  double tempered_log_density(const State& theta, double rho) const;

  /// One Metropolis-Hastings step; returns whether the proposal was accepted.
  bool move(State& theta, double rho, Rng& rng) const;

  const approx::GaussianApprox& reference() const { return reference_; }
  const LogisticData& data() const { return *data_; }
  double prior_var() const { return prior_var_; }

 private:
  std::shared_ptr<const LogisticData> data_;
  double prior_var_;
  approx::GaussianApprox reference_;
  Eigen::MatrixXd proposal_chol_;
};

}  // namespace sbs::models
