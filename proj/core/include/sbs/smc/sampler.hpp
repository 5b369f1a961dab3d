#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sbs/random.hpp"
#include "sbs/smc/config.hpp"
#include "sbs/smc/errors.hpp"
#include "sbs/smc/parallel.hpp"
#include "sbs/smc/particle_cloud.hpp"
#include "sbs/smc/trace.hpp"
#include "sbs/smc/weights.hpp"

namespace sbs::smc {

/// One sampling problem on the geometric bridge
///   p_rho  ∝  approx^(1 - rho) * (lik * prior)^rho.
///
/// `log_approx` must be a normalized density that `sample_approx` draws from
/// exactly, and `move` must leave p_rho invariant (one sweep per call).
/// For the classical bridge the approximation is the prior itself.
template <class T>
concept BridgeTarget = requires(const T& t, const typename T::State& s,
                                typename T::State& mut, Rng& rng, double rho) {
  requires std::default_initializable<typename T::State>;
  { t.log_prior(s) } -> std::convertible_to<double>;
  { t.log_lik(s) } -> std::convertible_to<double>;
  { t.log_approx(s) } -> std::convertible_to<double>;
  { t.sample_approx(rng) } -> std::convertible_to<typename T::State>;
  t.move(mut, rho, rng);
};

/// Proposal for the first generation when it differs from the path start.
template <class P, class State>
concept StartProposal = requires(const P& p, const State& s, Rng& rng) {
  { p.sample(rng) } -> std::convertible_to<State>;
  { p.log_density(s) } -> std::convertible_to<double>;
};

template <class State>
struct SamplerOutput {
  ParticleCloud<State> final_cloud;
  TemperingTrace trace;
  double log_evidence_product = 0.0;
  double log_evidence_path = 0.0;
  double wall_time = 0.0;  // seconds
};

namespace detail {

struct NoStart {};

inline bool bad_value(double v) {
  return std::isnan(v) || v == std::numeric_limits<double>::infinity();
}

template <BridgeTarget T>
double log_alpha_at(const T& target, const typename T::State& s, std::size_t m) {
  const double ll = target.log_lik(s);
  const double lp = target.log_prior(s);
  const double la = target.log_approx(s);
  if (bad_value(ll) || bad_value(lp) || bad_value(la))
    throw NonFiniteDensityError(m, "non-finite log density at sampled point");
  if (la == -std::numeric_limits<double>::infinity())
    throw NonFiniteDensityError(m, "approximation density vanishes at sampled point");
  if (ll == -std::numeric_limits<double>::infinity() ||
      lp == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  return ll + lp - la;
}

template <BridgeTarget T, class Start>
SamplerOutput<typename T::State> run(const T& target, const SamplerConfig& config,
                                     const Start* start) {
  using State = typename T::State;
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t m_count = config.particles;
  const double m_real = static_cast<double>(m_count);

  SamplerOutput<State> out;
  auto& cloud = out.final_cloud;
  auto& trace = out.trace;
  cloud.particles.resize(m_count);
  cloud.log_alpha.resize(m_count);
  cloud.log_weights.assign(m_count, 0.0);

  parallel_for(m_count, config.threads, [&](std::size_t m) {
    Rng rng = make_stream(config.master_seed, StreamTag::kInitial, 0, m);
    if constexpr (std::is_same_v<Start, NoStart>) {
      cloud.particles[m] = target.sample_approx(rng);
    } else {
      cloud.particles[m] = start->sample(rng);
      const double lq = start->log_density(cloud.particles[m]);
      const double lr = target.log_approx(cloud.particles[m]);
      if (bad_value(lq) || bad_value(lr) || lq == -std::numeric_limits<double>::infinity())
        throw NonFiniteDensityError(m, "non-finite start-proposal weight");
      cloud.log_weights[m] = lr - lq;
    }
    cloud.log_alpha[m] = log_alpha_at(target, cloud.particles[m], m);
  });

  const double init_log_sum = cloud.renormalize();
  if constexpr (!std::is_same_v<Start, NoStart>) {
    trace.initial_log_norm = init_log_sum - std::log(m_real);
  }
  trace.initial_ess = ess(cloud.norm_weights);
  trace.rho.push_back(0.0);
  trace.u.push_back(weighted_mean(cloud.norm_weights, cloud.log_alpha));

  double rho = 0.0;
  std::uint64_t generation = 0;
  while (rho < 1.0) {
    ++generation;
    if (generation > config.max_steps)
      throw DegenerateCloudError("tempering stalled: step limit reached", trace);

    RhoStep step;
    double log_ratio = 0.0;
    try {
      step = next_rho(cloud.norm_weights, cloud.log_alpha, rho, config);
      log_ratio = log_incremental_ratio(cloud.norm_weights, cloud.log_alpha, step.rho - rho);
      reweight(cloud, step.rho - rho);
    } catch (const DegenerateCloudError& e) {
      throw DegenerateCloudError(e.what(), trace);
    }

    const double step_ess = ess(cloud.norm_weights);
    const bool resampled = step_ess < config.tau2 * m_real;
    if (resampled) {
      Rng rng = make_stream(config.master_seed, StreamTag::kResample, generation, 0);
      resample_multinomial(cloud, rng);
    }
    rho = step.rho;

    parallel_for(m_count, config.threads, [&](std::size_t m) {
      Rng rng = make_stream(config.master_seed, StreamTag::kPropagate, generation, m);
      for (int b = 0; b < config.sweeps; ++b) target.move(cloud.particles[m], rho, rng);
      cloud.log_alpha[m] = log_alpha_at(target, cloud.particles[m], m);
    });

    trace.rho.push_back(rho);
    trace.cess.push_back(step.cess);
    trace.ess.push_back(step_ess);
    trace.resampled.push_back(resampled);
    trace.step_log_ratio.push_back(log_ratio);
    trace.slow_progress.push_back(step.slow_progress);
    trace.u.push_back(weighted_mean(cloud.norm_weights, cloud.log_alpha));
  }

  out.log_evidence_product = evidence_product(trace);
  out.log_evidence_path = evidence_path(trace);
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace detail

/// Adaptive SMC along the bridge defined by `target` (SBS or CBS variants).
template <BridgeTarget T>
SamplerOutput<typename T::State> run_sbs(const T& target, const SamplerConfig& config) {
  if (config.path == PathVariant::kCbsIs)
    throw std::invalid_argument("run_sbs: CBS_IS needs a start proposal");
  return detail::run<T, detail::NoStart>(target, config, nullptr);
}

/// CBS+IS: the path is the target's (prior-started) bridge, but generation 0
/// is drawn from `start` and importance-weighted back to the path start.
template <BridgeTarget T, StartProposal<typename T::State> P>
SamplerOutput<typename T::State> run_sbs(const T& target, const SamplerConfig& config,
                                         const P& start) {
  if (config.path != PathVariant::kCbsIs)
    throw std::invalid_argument("run_sbs: a start proposal is only valid with CBS_IS");
  return detail::run<T, P>(target, config, &start);
}

}  // namespace sbs::smc
