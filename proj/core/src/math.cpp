#include "sbs/math.hpp"

#include <algorithm>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sbs {

namespace {
// Evaluate in double rather than the library's default long double.
using FastPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
}  // namespace

double max_finite(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isfinite(v) && v > top) top = v;
  }
  return top;
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (top == -std::numeric_limits<double>::infinity()) return top;
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_gamma(double x) { return boost::math::lgamma(x, FastPolicy()); }

double digamma(double x) { return boost::math::digamma(x, FastPolicy()); }

double log_beta_fn(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double log_multivariate_beta(std::span<const double> alpha) {
  double s = 0.0;
  double total = 0.0;
  for (double a : alpha) {
    s += log_gamma(a);
    total += a;
  }
  return s - log_gamma(total);
}

double log_beta_density(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha) {
  double s = -log_multivariate_beta(alpha);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= 0.0) return -std::numeric_limits<double>::infinity();
    s += (alpha[k] - 1.0) * std::log(x[k]);
  }
  return s;
}

double log_normal_density(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double kahan_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace sbs
