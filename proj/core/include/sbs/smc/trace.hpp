#pragma once

#include <cstddef>
#include <vector>

namespace sbs::smc {

/// Realized tempering schedule of one run.
///
/// `rho` and `u` have one entry per generation h = 0..H; the per-step
/// sequences (`cess`, `ess`, `resampled`, `step_log_ratio`, `slow_progress`)
/// have one entry per step h = 1..H.
struct TemperingTrace {
  std::vector<double> rho;
  std::vector<double> cess;
  std::vector<double> ess;
  std::vector<bool> resampled;
  std::vector<double> step_log_ratio;
  std::vector<double> u;
  std::vector<bool> slow_progress;

  /// log of the mean initial importance weight; 0 unless the run was
  /// started from a proposal different from the path's reference.
  double initial_log_norm = 0.0;
  double initial_ess = 0.0;

  std::size_t steps() const { return step_log_ratio.size(); }
  bool complete() const;
};

/// Sum of the per-step log ratio estimates (log of the product estimator).
double evidence_product(const TemperingTrace& trace);

/// Trapezoidal path-sampling estimate built from the weighted means of log alpha.
double evidence_path(const TemperingTrace& trace);

}  // namespace sbs::smc
