#include "sbs/smc/trace.hpp"

#include <stdexcept>

namespace sbs::smc {

bool TemperingTrace::complete() const {
  const std::size_t h = step_log_ratio.size();
  return !rho.empty() && rho.front() == 0.0 && rho.back() == 1.0 && rho.size() == h + 1 &&
         u.size() == h + 1 && h >= 1;
}

double evidence_product(const TemperingTrace& trace) {
  if (!trace.complete()) throw std::invalid_argument("evidence_product: incomplete trace");
  double s = trace.initial_log_norm;
  for (double r : trace.step_log_ratio) s += r;
  return s;
}

double evidence_path(const TemperingTrace& trace) {
  if (!trace.complete()) throw std::invalid_argument("evidence_path: incomplete trace");
  double s = 0.0;
  for (std::size_t h = 1; h < trace.rho.size(); ++h) {
    s += 0.5 * (trace.rho[h] - trace.rho[h - 1]) * (trace.u[h] + trace.u[h - 1]);
  }
  return s;
}

}  // namespace sbs::smc
