#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbs/random.hpp"
#include "sbs/smc/config.hpp"

namespace sbs::smc {

struct NormalizedWeights {
  std::vector<double> weights;  // softmax of the input
  double log_sum = 0.0;         // log-sum-exp of the input
};

/// Softmax plus log-sum-exp. Throws DegenerateCloudError when every entry is -inf.
NormalizedWeights normalize_log_weights(std::span<const double> log_weights);

/// (sum W)^2 / sum W^2 for normalized weights; lies in [1, M].
double ess(std::span<const double> norm_weights);

/// Conditional ESS of moving the cloud by `delta_rho` along the geometric path:
///   M (sum_m W_m alpha_m^d)^2 / sum_m W_m alpha_m^{2d}
/// evaluated in log space. Equals M at delta_rho = 0.
double cess(std::span<const double> norm_weights, std::span<const double> log_alpha,
            double delta_rho);

/// log sum_m W_m alpha_m^d: the log of one factor of the product evidence estimator.
double log_incremental_ratio(std::span<const double> norm_weights,
                             std::span<const double> log_alpha, double delta_rho);

struct RhoStep {
  double rho = 1.0;
  double cess = 0.0;
  bool slow_progress = false;  // threshold unreachable even at the minimum increment
};

/// Next temperature: 1 if the full remaining step keeps cESS >= tau1 M, else
/// the bisection crossing, never less than rho_prev + rho_tolerance.
RhoStep next_rho(std::span<const double> norm_weights, std::span<const double> log_alpha,
                 double rho_prev, const SamplerConfig& config);

/// Ancestor indices of M i.i.d. categorical draws from `norm_weights`.
std::vector<std::size_t> multinomial_ancestors(std::span<const double> norm_weights,
                                               std::size_t count, Rng& rng);

/// sum_m W_m x_m with -inf x_m ignored where W_m == 0.
double weighted_mean(std::span<const double> norm_weights, std::span<const double> values);

}  // namespace sbs::smc
