#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "sbs/smc/trace.hpp"

namespace sbs::smc {

/// Every particle weight collapsed to zero.
class DegenerateCloudError : public std::runtime_error {
 public:
  explicit DegenerateCloudError(const std::string& what) : std::runtime_error(what) {}
  DegenerateCloudError(const std::string& what, TemperingTrace partial)
      : std::runtime_error(what), partial_trace_(std::move(partial)) {}

  const TemperingTrace& partial_trace() const { return partial_trace_; }

 private:
  TemperingTrace partial_trace_;
};

/// A density evaluated to NaN or +inf at a sampled particle.
class NonFiniteDensityError : public std::runtime_error {
 public:
  NonFiniteDensityError(std::size_t particle, const std::string& what)
      : std::runtime_error(what + " (particle " + std::to_string(particle) + ")"),
        particle_(particle) {}

  std::size_t particle() const { return particle_; }

 private:
  std::size_t particle_;
};

}  // namespace sbs::smc
