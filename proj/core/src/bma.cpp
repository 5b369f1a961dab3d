#include "sbs/calibration/bma.hpp"

#include <cmath>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs::calibration {

std::vector<double> model_posterior(std::span<const double> log_evidence,
                                    std::span<const double> log_prior_g) {
  if (log_evidence.empty()) throw std::invalid_argument("model_posterior: no models");
  if (!log_prior_g.empty() && log_prior_g.size() != log_evidence.size())
    throw std::invalid_argument("model_posterior: prior length differs");
  std::vector<double> s(log_evidence.begin(), log_evidence.end());
  for (std::size_t g = 0; g < s.size(); ++g) {
    if (!std::isfinite(s[g])) throw std::invalid_argument("model_posterior: non-finite evidence");
    if (!log_prior_g.empty()) s[g] += log_prior_g[g];
  }
  const double lse = log_sum_exp(s);
  for (auto& v : s) v = std::exp(v - lse);
  return s;
}

BmaMoments bma_moments(std::span<const double> per_g_mean, std::span<const double> per_g_var,
                       std::span<const double> p_g) {
  if (per_g_mean.size() != per_g_var.size() || per_g_mean.size() != p_g.size() || p_g.empty())
    throw std::invalid_argument("bma_moments: lengths differ");
  BmaMoments out;
  for (std::size_t g = 0; g < p_g.size(); ++g) {
    out.mean += p_g[g] * per_g_mean[g];
    out.within_var += p_g[g] * per_g_var[g];
  }
  for (std::size_t g = 0; g < p_g.size(); ++g) {
    const double d = per_g_mean[g] - out.mean;
    out.between_var += p_g[g] * d * d;
  }
  out.sd = std::sqrt(out.within_var + out.between_var);
  out.ratio = out.sd > 0.0 ? out.mean / out.sd : 0.0;
  return out;
}

}  // namespace sbs::calibration
