#include "sbs/models/conjugate.hpp"

#include <cmath>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs::models {

GaussianMeanTarget::GaussianMeanTarget(std::vector<double> y, double noise_var, double prior_mean,
                                       double prior_var, double ref_mean, double ref_var)
    : y_(std::move(y)),
      noise_var_(noise_var),
      prior_mean_(prior_mean),
      prior_var_(prior_var),
      ref_mean_(ref_mean),
      ref_var_(ref_var) {
  if (!(noise_var > 0.0 && prior_var > 0.0 && ref_var > 0.0))
    throw std::invalid_argument("GaussianMeanTarget: variances must be positive");
  for (double v : y_) sum_y_ += v;
  const double n = static_cast<double>(y_.size());
  post_var_ = 1.0 / (1.0 / prior_var_ + n / noise_var_);
  post_mean_ = post_var_ * (prior_mean_ / prior_var_ + sum_y_ / noise_var_);
}

GaussianMeanTarget GaussianMeanTarget::from_prior(std::vector<double> y, double noise_var,
                                                  double prior_mean, double prior_var) {
  return {std::move(y), noise_var, prior_mean, prior_var, prior_mean, prior_var};
}

GaussianMeanTarget GaussianMeanTarget::from_posterior(std::vector<double> y, double noise_var,
                                                      double prior_mean, double prior_var) {
  GaussianMeanTarget t(y, noise_var, prior_mean, prior_var, prior_mean, prior_var);
  return {std::move(y), noise_var, prior_mean, prior_var, t.post_mean_, t.post_var_};
}

double GaussianMeanTarget::log_prior(double theta) const {
  return log_normal_density(theta, prior_mean_, prior_var_);
}

double GaussianMeanTarget::log_lik(double theta) const {
  double s = 0.0;
  for (double v : y_) s += log_normal_density(v, theta, noise_var_);
  return s;
}

double GaussianMeanTarget::log_approx(double theta) const {
  return log_normal_density(theta, ref_mean_, ref_var_);
}

double GaussianMeanTarget::sample_approx(Rng& rng) const {
  return ref_mean_ + std::sqrt(ref_var_) * std_normal(rng);
}

std::pair<double, double> GaussianMeanTarget::tempered_moments(double rho) const {
  const double n = static_cast<double>(y_.size());
  const double prec = (1.0 - rho) / ref_var_ + rho * (1.0 / prior_var_ + n / noise_var_);
  const double lin = (1.0 - rho) * ref_mean_ / ref_var_ +
                     rho * (prior_mean_ / prior_var_ + sum_y_ / noise_var_);
  return {lin / prec, 1.0 / prec};
}

void GaussianMeanTarget::move(double& theta, double rho, Rng& rng) const {
  const auto [mean, var] = tempered_moments(rho);
  theta = mean + std::sqrt(var) * std_normal(rng);
}

double GaussianMeanTarget::log_evidence() const {
  // Any theta works: p(Y) = lik(theta) prior(theta) / posterior(theta).
  const double t = post_mean_;
  return log_lik(t) + log_prior(t) - log_normal_density(t, post_mean_, post_var_);
}

BetaBinomialTarget::BetaBinomialTarget(int n, int k, double a, double b, double ref_a,
                                       double ref_b)
    : n_(n), k_(k), a_(a), b_(b), ref_a_(ref_a), ref_b_(ref_b) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("BetaBinomialTarget: need 0 <= k <= n");
  if (!(a > 0.0 && b > 0.0 && ref_a > 0.0 && ref_b > 0.0))
    throw std::invalid_argument("BetaBinomialTarget: shapes must be positive");
}

double BetaBinomialTarget::log_prior(double theta) const { return log_beta_density(theta, a_, b_); }

double BetaBinomialTarget::log_lik(double theta) const {
  return k_ * std::log(theta) + (n_ - k_) * std::log1p(-theta);
}

double BetaBinomialTarget::log_approx(double theta) const {
  return log_beta_density(theta, ref_a_, ref_b_);
}

double BetaBinomialTarget::sample_approx(Rng& rng) const { return beta_draw(rng, ref_a_, ref_b_); }

void BetaBinomialTarget::move(double& theta, double rho, Rng& rng) const {
  const double s1 = (1.0 - rho) * ref_a_ + rho * (a_ + k_);
  const double s2 = (1.0 - rho) * ref_b_ + rho * (b_ + n_ - k_);
  theta = beta_draw(rng, s1, s2);
}

double BetaBinomialTarget::log_evidence() const {
  return log_beta_fn(a_ + k_, b_ + n_ - k_) - log_beta_fn(a_, b_);
}

}  // namespace sbs::models
