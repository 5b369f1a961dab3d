#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sbs/random.hpp"
#include "sbs/smc/weights.hpp"

namespace sbs::smc {

/// M weighted particles plus the cached log alpha of each one.
template <class State>
struct ParticleCloud {
  std::vector<State> particles;
  std::vector<double> log_weights;
  std::vector<double> norm_weights;
  std::vector<double> log_alpha;

  std::size_t size() const { return particles.size(); }

  /// Recomputes norm_weights from log_weights; returns the log-sum.
  double renormalize() {
    auto nw = normalize_log_weights(log_weights);
    norm_weights = std::move(nw.weights);
    return nw.log_sum;
  }
};

/// Multiplies each weight by alpha^delta_rho using the cloud's stored
/// (previous generation) log alpha values, then renormalizes.
template <class State>
void reweight(ParticleCloud<State>& cloud, double delta_rho) {
  if (delta_rho < 0.0) throw std::invalid_argument("reweight: negative delta_rho");
  if (delta_rho == 0.0) return;
  for (std::size_t m = 0; m < cloud.size(); ++m) {
    if (cloud.log_weights[m] == -std::numeric_limits<double>::infinity()) continue;
    cloud.log_weights[m] += delta_rho * cloud.log_alpha[m];
  }
  cloud.renormalize();
}

/// M i.i.d. multinomial draws; the output carries uniform weights.
template <class State>
void resample_multinomial(ParticleCloud<State>& cloud, Rng& rng) {
  const std::size_t m_count = cloud.size();
  const auto ancestors = multinomial_ancestors(cloud.norm_weights, m_count, rng);
  std::vector<State> next;
  std::vector<double> next_alpha(m_count);
  next.reserve(m_count);
  for (std::size_t i = 0; i < m_count; ++i) {
    next.push_back(cloud.particles[ancestors[i]]);
    next_alpha[i] = cloud.log_alpha[ancestors[i]];
  }
  cloud.particles = std::move(next);
  cloud.log_alpha = std::move(next_alpha);
  cloud.log_weights.assign(m_count, 0.0);
  cloud.norm_weights.assign(m_count, 1.0 / static_cast<double>(m_count));
}

}  // namespace sbs::smc
