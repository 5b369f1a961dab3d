#include "sbs/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, StreamTag tag, std::uint64_t generation,
                std::uint64_t index) {
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ static_cast<std::uint64_t>(tag));
  s = mix64(s ^ generation);
  s = mix64(s ^ (index * 0xd1b54a32d192ed03ULL));
  return Rng(s);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed ^ 0x5851f42d4c957f2dULL) + index);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

double gamma_draw(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma_draw: shape must be positive");
  return std::gamma_distribution<double>(shape, 1.0)(rng);
}

double beta_draw(Rng& rng, double a, double b) {
  const double x = gamma_draw(rng, a);
  const double y = gamma_draw(rng, b);
  const double s = x + y;
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  // Keep draws in the open interval so log densities stay finite.
  if (s > 0.0) return std::clamp(x / s, lo, hi);
  // Both gammas underflowed (tiny shapes): fall back to the limiting Bernoulli.
  return uniform01(rng) < a / (a + b) ? hi : lo;
}

void dirichlet_draw(Rng& rng, std::span<const double> alpha, std::span<double> out) {
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma_draw(rng, alpha[k]);
    total += out[k];
  }
  if (total > 0.0) {
    for (auto& v : out) v = std::max(v / total, std::numeric_limits<double>::min());
    return;
  }
  const std::size_t hit = static_cast<std::size_t>(uniform01(rng) * alpha.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = (k == hit) ? 1.0 : std::numeric_limits<double>::min();
}

std::size_t categorical_from_log(Rng& rng, std::span<const double> log_mass) {
  const double top = max_finite(log_mass);
  if (!std::isfinite(top)) throw std::invalid_argument("categorical_from_log: no finite mass");
  double total = 0.0;
  for (double lm : log_mass) total += std::exp(lm - top);
  double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < log_mass.size(); ++k) {
    u -= std::exp(log_mass[k] - top);
    if (u <= 0.0) return k;
  }
  // Rounding: return the last index carrying mass.
  for (std::size_t k = log_mass.size(); k-- > 0;) {
    if (std::isfinite(log_mass[k])) return k;
  }
  return log_mass.size() - 1;
}

}  // namespace sbs
