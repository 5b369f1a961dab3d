#include "sbs/approx/logistic_fit.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "sbs/math.hpp"

namespace sbs::approx {

double jj_lambda(double xi) {
  const double a = std::abs(xi);
  if (a < 1e-6) return 0.125 - a * a / 96.0;
  return std::tanh(0.5 * a) / (4.0 * a);
}

namespace {

double log_sigmoid(double x) { return -log1pexp(-x); }

}  // namespace

LogisticVbFit fit_vb_logistic_detailed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       double prior_var, const LogisticVbOptions& options) {
  if (!(prior_var > 0.0)) throw std::invalid_argument("fit_vb_logistic: prior_var must be positive");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_vb_logistic: X and y lengths differ");
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  LogisticVbFit fit;
  if (n == 0) {
    fit.approx = GaussianApprox::isotropic(p, prior_var);
    fit.elbo_trace.push_back(0.0);
    return fit;
  }

  const Eigen::VectorXd centered = y.array() - 0.5;
  const Eigen::VectorXd rhs = x.transpose() * centered;
  const double prior_log_det = static_cast<double>(p) * std::log(prior_var);
  Eigen::VectorXd xi = Eigen::VectorXd::Ones(n);

  double prev = -std::numeric_limits<double>::infinity();
  double delta = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd two_lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) two_lambda(i) = 2.0 * jj_lambda(xi(i));

    Eigen::MatrixXd precision = x.transpose() * two_lambda.asDiagonal() * x;
    precision.diagonal().array() += 1.0 / prior_var;
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("fit_vb_logistic: precision lost positive definiteness");
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd mean = llt.solve(rhs);
    const Eigen::MatrixXd lower = llt.matrixL();
    const double log_det_cov = -2.0 * lower.diagonal().array().log().sum();

    double elbo = 0.5 * (log_det_cov - prior_log_det) + 0.5 * mean.dot(rhs);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lam = 0.5 * two_lambda(i);
      elbo += log_sigmoid(xi(i)) - 0.5 * xi(i) + lam * xi(i) * xi(i);
    }
    fit.elbo_trace.push_back(elbo);

    const Eigen::MatrixXd second = cov + mean * mean.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      xi(i) = std::sqrt(std::max(0.0, x.row(i).dot(second * x.row(i).transpose())));
    }

    delta = std::abs(elbo - prev);
    if (delta <= options.tolerance * (1.0 + std::abs(elbo))) {
      fit.approx = GaussianApprox(mean, cov);
      fit.xi.assign(xi.data(), xi.data() + n);
      return fit;
    }
    prev = elbo;
  }
  throw ConvergenceError("fit_vb_logistic: no convergence", delta);
}

GaussianApprox fit_ml_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double prior_var) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n == 0) throw std::invalid_argument("fit_ml_logistic: no observations");
  if (x.rows() != y.size()) throw std::invalid_argument("fit_ml_logistic: X and y lengths differ");
  const double penalty = std::isfinite(prior_var) ? 1.0 / prior_var : 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = x * theta;
    double s = -0.5 * penalty * theta.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) s += bernoulli_logit_lpmf(y(i) > 0.5, eta(i));
    return s;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double current = objective(theta);
  constexpr int kMaxIter = 200;
  constexpr double kDivergence = 1e3;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd eta = x * theta;
    Eigen::VectorXd resid(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = 1.0 / (1.0 + std::exp(-eta(i)));
      resid(i) = y(i) - prob;
      w(i) = prob * (1.0 - prob);
    }
    const Eigen::VectorXd grad = x.transpose() * resid - penalty * theta;
    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    hess.diagonal().array() += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff()))
      throw SeparationError("fit_ml_logistic: information matrix is singular (separated data?)");
    Eigen::VectorXd step = ldlt.solve(grad);

    double scale = 1.0;
    Eigen::VectorXd proposal = theta + step;
    double value = objective(proposal);
    while (value < current - 1e-12 && scale > 1e-8) {
      scale *= 0.5;
      proposal = theta + scale * step;
      value = objective(proposal);
    }
    theta = proposal;
    current = value;
    if (theta.cwiseAbs().maxCoeff() > kDivergence)
      throw SeparationError("fit_ml_logistic: estimates diverge (separated data)");
    if ((scale * step).cwiseAbs().maxCoeff() < 1e-10) {
      const Eigen::VectorXd eta_hat = x * theta;
      Eigen::VectorXd w_hat(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double prob = 1.0 / (1.0 + std::exp(-eta_hat(i)));
        w_hat(i) = prob * (1.0 - prob);
      }
      Eigen::MatrixXd info = x.transpose() * w_hat.asDiagonal() * x;
      info.diagonal().array() += penalty;
      Eigen::LLT<Eigen::MatrixXd> llt(info);
      if (llt.info() != Eigen::Success)
        throw SeparationError("fit_ml_logistic: singular information at the optimum");
      return GaussianApprox(theta, llt.solve(Eigen::MatrixXd::Identity(p, p)));
    }
  }
  throw SeparationError("fit_ml_logistic: Newton iterations did not converge (separated data?)");
}

}  // namespace sbs::approx
