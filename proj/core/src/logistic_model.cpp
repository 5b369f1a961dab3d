#include "sbs/models/logistic.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "sbs/math.hpp"

namespace sbs::models {

double log_lik_logistic(const Eigen::VectorXd& theta, const LogisticData& data) {
  if (theta.size() != data.p()) throw std::invalid_argument("log_lik_logistic: dimension mismatch");
  const Eigen::VectorXd eta = data.x * theta;
  double s = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) s += bernoulli_logit_lpmf(data.y(i) > 0.5, eta(i));
  return s;
}

double log_prior_logistic(const Eigen::VectorXd& theta, double prior_var) {
  const double p = static_cast<double>(theta.size());
  return -0.5 * (p * (kLog2Pi + std::log(prior_var)) + theta.squaredNorm() / prior_var);
}

double log_joint_logistic(const Eigen::VectorXd& theta, const LogisticData& data,
                          double prior_var) {
  return log_lik_logistic(theta, data) + log_prior_logistic(theta, prior_var);
}

LogisticTarget::LogisticTarget(std::shared_ptr<const LogisticData> data, double prior_var,
                               approx::GaussianApprox reference,
                               const Eigen::MatrixXd& proposal_cov)
    : data_(std::move(data)), prior_var_(prior_var), reference_(std::move(reference)) {
  if (!data_) throw std::invalid_argument("LogisticTarget: null data");
  if (reference_.dim() != data_->p() || proposal_cov.rows() != data_->p())
    throw std::invalid_argument("LogisticTarget: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(proposal_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("LogisticTarget: proposal covariance is not positive definite");
  proposal_chol_ = llt.matrixL();
}

double LogisticTarget::tempered_log_density(const State& theta, double rho) const {
  double s = rho * (log_lik(theta) + log_prior(theta));
  if (rho < 1.0) s += (1.0 - rho) * log_approx(theta);
  return s;
}

bool LogisticTarget::move(State& theta, double rho, Rng& rng) const {
  const auto component = static_cast<std::size_t>(uniform01(rng) * kProposalScales.size());
  const double scale = std::sqrt(kProposalScales[std::min<std::size_t>(component, 2)]);
  Eigen::VectorXd z(theta.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = std_normal(rng);
  const State proposal = theta + scale * (proposal_chol_ * z);
  const double log_ratio = tempered_log_density(proposal, rho) - tempered_log_density(theta, rho);
  if (std::log(uniform01(rng)) < log_ratio) {
    theta = proposal;
    return true;
  }
  return false;
}

}  // namespace sbs::models
