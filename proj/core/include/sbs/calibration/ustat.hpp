#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sbs::calibration {

/// sum_m W_m [1{phi_m < phi_star} + 1/2 1{phi_m == phi_star}].
/// Empty or unequal-length input throws std::invalid_argument.
double u_statistic(double phi_star, std::span<const double> phi_sample,
                   std::span<const double> weights);
/// Uniform weights.
double u_statistic(double phi_star, std::span<const double> phi_sample);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample KS test of uniformity. Without `lattice_size` the reference is
/// U[0, 1] and the p-value is asymptotic (with the small-sample correction
/// (sqrt(S) + 0.12 + 0.11 / sqrt(S)) D). With `lattice_size = L` the reference is
/// uniform on {0, 1/(L-1), ..., 1} and the p-value comes from `null_draws`
/// seeded simulations of the null. Needs at least 10 values.
KsResult ks_uniform_test(std::span<const double> u_values,
                         std::optional<int> lattice_size = std::nullopt,
                         std::uint64_t seed = 1, int null_draws = 10000);

/// Two-sample KS test, asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Lower-tail weighted quantile: smallest value whose cumulative weight reaches prob.
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double prob);

/// Fraction of replicates whose equal-tailed `level` weighted interval holds theta_star.
struct CoverageCase {
  double theta_star = 0.0;
  std::vector<double> values;
  std::vector<double> weights;
};
double ci_coverage(std::span<const CoverageCase> cases, double level);
bool interval_contains(const CoverageCase& c, double level);

}  // namespace sbs::calibration
