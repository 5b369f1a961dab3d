#pragma once

#include <vector>

#include "sbs/random.hpp"

namespace sbs::models {

/// y_i ~ N(theta, noise_var), theta ~ N(prior_mean, prior_var). The bridge
/// starts from N(ref_mean, ref_var); every tempered target is Gaussian, so
/// `move` draws from it exactly.
class GaussianMeanTarget {
 public:
  using State = double;

  GaussianMeanTarget(std::vector<double> y, double noise_var, double prior_mean,
                     double prior_var, double ref_mean, double ref_var);

  /// Reference equal to the prior (classical bridge).
  static GaussianMeanTarget from_prior(std::vector<double> y, double noise_var,
                                       double prior_mean, double prior_var);
  /// Reference equal to the exact posterior.
  static GaussianMeanTarget from_posterior(std::vector<double> y, double noise_var,
                                           double prior_mean, double prior_var);

  double log_prior(double theta) const;
  double log_lik(double theta) const;
  double log_approx(double theta) const;
  double sample_approx(Rng& rng) const;
  void move(double& theta, double rho, Rng& rng) const;

  double posterior_mean() const { return post_mean_; }
  double posterior_var() const { return post_var_; }
  double log_evidence() const;

  /// Mean and variance of p_rho.
  std::pair<double, double> tempered_moments(double rho) const;

 private:
  std::vector<double> y_;
  double noise_var_, prior_mean_, prior_var_, ref_mean_, ref_var_;
  double sum_y_ = 0.0;
  double post_mean_ = 0.0, post_var_ = 0.0;
};

/// k successes in n trials, theta ~ Beta(a, b), reference Beta(ref_a, ref_b).
/// The likelihood omits the binomial coefficient, so the evidence is
/// B(a + k, b + n - k) / B(a, b).
class BetaBinomialTarget {
 public:
  using State = double;

  BetaBinomialTarget(int n, int k, double a, double b, double ref_a, double ref_b);
  static BetaBinomialTarget from_prior(int n, int k, double a, double b) {
    return {n, k, a, b, a, b};
  }
  static BetaBinomialTarget from_posterior(int n, int k, double a, double b) {
    return {n, k, a, b, a + k, b + n - k};
  }

  double log_prior(double theta) const;
  double log_lik(double theta) const;
  double log_approx(double theta) const;
  double sample_approx(Rng& rng) const;
  void move(double& theta, double rho, Rng& rng) const;

  double log_evidence() const;

 private:
  int n_, k_;
  double a_, b_, ref_a_, ref_b_;
};

}  // namespace sbs::models
