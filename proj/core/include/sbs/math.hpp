#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace sbs {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// Largest finite entry, or -inf if none.
double max_finite(std::span<const double> values);

/// log(sum(exp(values))); -inf when every entry is -inf.
double log_sum_exp(std::span<const double> values);

/// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

/// Bernoulli log-mass of y under logit eta.
inline double bernoulli_logit_lpmf(int y, double eta) {
  return (y != 0 ? eta : 0.0) - log1pexp(eta);
}

double log_gamma(double x);
double digamma(double x);
double log_beta_fn(double a, double b);
/// log B(alpha) = sum lgamma(alpha_k) - lgamma(sum alpha).
double log_multivariate_beta(std::span<const double> alpha);

double log_beta_density(double x, double a, double b);
double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha);
double log_normal_density(double x, double mean, double var);

/// Numerically tight sum; traversal order is fixed so reductions are reproducible.
double kahan_sum(std::span<const double> values);

}  // namespace sbs
