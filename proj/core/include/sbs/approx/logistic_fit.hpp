#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbs/approx/gaussian.hpp"

namespace sbs::approx {

/// Iterative fitter ran out of iterations; carries the last objective change.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_delta)
      : std::runtime_error(what + " (last change " + std::to_string(last_delta) + ")"),
        last_delta_(last_delta) {}
  double last_delta() const { return last_delta_; }

 private:
  double last_delta_;
};

class SeparationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogisticVbFit {
  GaussianApprox approx;
  std::vector<double> elbo_trace;  // one value per iteration
  std::vector<double> xi;          // converged local bound parameters
};

struct LogisticVbOptions {
  double tolerance = 1e-12;  // relative ELBO change
  int max_iterations = 10000;
};

/// Gaussian VB for logistic regression with prior N(0, prior_var I), using the
/// local quadratic bound on log(1 + e^x) and alternating updates of q and the
/// bound parameters. Throws ConvergenceError when max_iterations is reached.
LogisticVbFit fit_vb_logistic_detailed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       double prior_var, const LogisticVbOptions& options = {});

inline GaussianApprox fit_vb_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      double prior_var) {
  return fit_vb_logistic_detailed(x, y, prior_var).approx;
}

/// Newton-Raphson mode with inverse observed information as covariance.
/// An infinite `prior_var` gives the plain maximum-likelihood fit (the usual
/// glm answer); a finite one adds the N(0, prior_var I) penalty.
/// Throws std::invalid_argument for n = 0 and SeparationError when the
/// iterates diverge.
GaussianApprox fit_ml_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double prior_var);

/// lambda(xi) = tanh(xi / 2) / (4 xi), with the xi -> 0 limit 1/8.
double jj_lambda(double xi);

}  // namespace sbs::approx
