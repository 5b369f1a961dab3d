#include "sbs/smc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbs/math.hpp"
#include "sbs/smc/errors.hpp"

namespace sbs::smc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(W_m) + scale * log_alpha_m, with 0 * (-inf) treated as 0 and zero
// weights mapped to -inf.
void shifted_terms(std::span<const double> norm_weights, std::span<const double> log_alpha,
                   double scale, std::vector<double>& out) {
  out.resize(norm_weights.size());
  for (std::size_t m = 0; m < norm_weights.size(); ++m) {
    if (norm_weights[m] <= 0.0) {
      out[m] = kNegInf;
      continue;
    }
    const double la = log_alpha[m];
    const double inc = (scale == 0.0) ? 0.0 : scale * la;
    out[m] = std::log(norm_weights[m]) + inc;
  }
}

}  // namespace

std::string_view to_string(PathVariant v) {
  switch (v) {
    case PathVariant::kSbs: return "SBS";
    case PathVariant::kCbs: return "CBS";
    case PathVariant::kCbsIs: return "CBS_IS";
  }
  return "SBS";
}

PathVariant parse_path_variant(std::string_view text) {
  if (text == "SBS" || text == "sbs") return PathVariant::kSbs;
  if (text == "CBS" || text == "cbs") return PathVariant::kCbs;
  if (text == "CBS_IS" || text == "cbs_is" || text == "CBS+IS") return PathVariant::kCbsIs;
  throw std::invalid_argument("unknown path variant: " + std::string(text));
}

void SamplerConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("SamplerConfig: need at least 2 particles");
  if (!(tau1 > 0.0 && tau1 <= 1.0)) throw std::invalid_argument("SamplerConfig: tau1 must lie in (0,1]");
  if (!(tau2 > 0.0 && tau2 <= 1.0)) throw std::invalid_argument("SamplerConfig: tau2 must lie in (0,1]");
  if (sweeps < 1) throw std::invalid_argument("SamplerConfig: sweeps must be >= 1");
  if (bisection_iters < 1) throw std::invalid_argument("SamplerConfig: bisection_iters must be >= 1");
  if (!(rho_tolerance > 0.0 && rho_tolerance < 1.0))
    throw std::invalid_argument("SamplerConfig: rho_tolerance must lie in (0,1)");
  if (threads < 1) throw std::invalid_argument("SamplerConfig: threads must be >= 1");
}

NormalizedWeights normalize_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("normalize_log_weights: empty input");
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("normalize_log_weights: NaN or +inf log-weight");
  }
  NormalizedWeights out;
  out.log_sum = log_sum_exp(log_weights);
  if (out.log_sum == kNegInf) throw DegenerateCloudError("all particle weights are zero");
  out.weights.resize(log_weights.size());
  for (std::size_t m = 0; m < log_weights.size(); ++m) {
    out.weights[m] = std::exp(log_weights[m] - out.log_sum);
  }
  return out;
}

double ess(std::span<const double> norm_weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : norm_weights) {
    s += w;
    s2 += w * w;
  }
  return s * s / s2;
}

double cess(std::span<const double> norm_weights, std::span<const double> log_alpha,
            double delta_rho) {
  if (norm_weights.size() != log_alpha.size())
    throw std::invalid_argument("cess: weight and alpha lengths differ");
  if (delta_rho < 0.0) throw std::invalid_argument("cess: negative delta_rho");
  const double m = static_cast<double>(norm_weights.size());
  if (delta_rho == 0.0) return m;
  std::vector<double> first;
  std::vector<double> second;
  shifted_terms(norm_weights, log_alpha, delta_rho, first);
  shifted_terms(norm_weights, log_alpha, 2.0 * delta_rho, second);
  const double l1 = log_sum_exp(first);
  const double l2 = log_sum_exp(second);
  if (l1 == kNegInf || l2 == kNegInf)
    throw DegenerateCloudError("cess: every particle carries zero incremental weight");
  // Jensen keeps the ratio <= 1; clamp rounding excursions.
  return m * std::min(1.0, std::exp(2.0 * l1 - l2));
}

double log_incremental_ratio(std::span<const double> norm_weights,
                             std::span<const double> log_alpha, double delta_rho) {
  std::vector<double> terms;
  shifted_terms(norm_weights, log_alpha, delta_rho, terms);
  return log_sum_exp(terms);
}

RhoStep next_rho(std::span<const double> norm_weights, std::span<const double> log_alpha,
                 double rho_prev, const SamplerConfig& config) {
  if (!(rho_prev >= 0.0 && rho_prev < 1.0))
    throw std::invalid_argument("next_rho: rho_prev must lie in [0,1)");
  const double threshold = config.tau1 * static_cast<double>(norm_weights.size());
  const double full = 1.0 - rho_prev;

  RhoStep step;
  const double c_full = cess(norm_weights, log_alpha, full);
  if (c_full >= threshold) {
    step.rho = 1.0;
    step.cess = c_full;
    return step;
  }

  // Invariant: cess(lo) >= threshold, cess(hi) < threshold.
  double lo = 0.0;
  double hi = full;
  for (int it = 0; it < config.bisection_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cess(norm_weights, log_alpha, mid) >= threshold) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= config.rho_tolerance) break;
  }

  double delta = lo;
  if (delta < config.rho_tolerance) {
    delta = std::min(config.rho_tolerance, full);
    step.slow_progress = cess(norm_weights, log_alpha, delta) < threshold;
  }
  step.rho = std::min(1.0, rho_prev + delta);
  if (step.rho <= rho_prev) step.rho = std::nextafter(rho_prev, 2.0);
  step.cess = cess(norm_weights, log_alpha, step.rho - rho_prev);
  return step;
}

std::vector<std::size_t> multinomial_ancestors(std::span<const double> norm_weights,
                                               std::size_t count, Rng& rng) {
  std::vector<double> cumulative(norm_weights.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < norm_weights.size(); ++m) {
    acc += norm_weights[m];
    cumulative[m] = acc;
  }
  if (!(acc > 0.0)) throw DegenerateCloudError("resampling from an all-zero weight vector");

  std::size_t last_positive = 0;
  for (std::size_t m = 0; m < norm_weights.size(); ++m) {
    if (norm_weights[m] > 0.0) last_positive = m;
  }

  std::vector<std::size_t> ancestors(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= norm_weights.size()) idx = last_positive;
    // upper_bound may land on a zero-weight slot that shares its cumulative
    // value with the previous positive one; walk forward to a real particle.
    while (norm_weights[idx] <= 0.0 && idx < last_positive) ++idx;
    ancestors[i] = idx;
  }
  return ancestors;
}

double weighted_mean(std::span<const double> norm_weights, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t m = 0; m < norm_weights.size(); ++m) {
    if (norm_weights[m] <= 0.0) continue;
    s += norm_weights[m] * values[m];
  }
  return s;
}

}  // namespace sbs::smc
