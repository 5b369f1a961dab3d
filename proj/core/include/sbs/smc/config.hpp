#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace sbs::smc {

/// SBS tempers from the approximation; CBS from the prior; CBS_IS follows the
/// prior path but draws its first generation from the approximation.
enum class PathVariant { kSbs, kCbs, kCbsIs };

std::string_view to_string(PathVariant v);
PathVariant parse_path_variant(std::string_view text);

struct SamplerConfig {
  std::size_t particles = 1000;
  double tau1 = 0.9;  // cESS threshold fraction driving the rho schedule
  double tau2 = 0.8;  // ESS fraction below which the cloud is resampled
  int sweeps = 5;     // kernel applications per propagation
  std::uint64_t master_seed = 1;
  PathVariant path = PathVariant::kSbs;
  int bisection_iters = 60;
  double rho_tolerance = 1e-10;
  int threads = 1;
  std::uint64_t max_steps = 100000;  // hard stop for stalled schedules

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

}  // namespace sbs::smc
