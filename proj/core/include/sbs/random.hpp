#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace sbs {

using Rng = std::mt19937_64;

/// Stream tags keep the substreams of different consumers disjoint.
enum class StreamTag : std::uint64_t {
  kInitial = 1,
  kPropagate = 2,
  kResample = 3,
  kReplicate = 4,
  kFit = 5,
  kSimulate = 6,
  kAux = 7,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic substream derived from (master_seed, tag, generation, index).
/// Every particle owns one substream per generation, so results do not depend
/// on how particles are scheduled across worker threads.
Rng make_stream(std::uint64_t master_seed, StreamTag tag, std::uint64_t generation,
                std::uint64_t index);

/// Child seed for nested jobs (replicates, per-g runs).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

double uniform01(Rng& rng);
double std_normal(Rng& rng);
double gamma_draw(Rng& rng, double shape);
double beta_draw(Rng& rng, double a, double b);
void dirichlet_draw(Rng& rng, std::span<const double> alpha, std::span<double> out);

/// Draws an index with probability proportional to exp(log_mass[k]).
std::size_t categorical_from_log(Rng& rng, std::span<const double> log_mass);

}  // namespace sbs
