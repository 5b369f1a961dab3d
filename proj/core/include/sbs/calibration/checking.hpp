#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbs/calibration/ustat.hpp"
#include "sbs/random.hpp"
#include "sbs/smc/parallel.hpp"

namespace sbs::calibration {

/// U values and KS results of one method over S replicates.
struct CalibrationReport {
  std::string method;
  std::vector<std::string> phi_names;
  std::vector<std::vector<double>> u;  // [phi][replicate], successful replicates only
  std::vector<KsResult> ks;            // per phi; NaN when fewer than 10 values
  std::vector<double> coverage;        // per phi; empty unless intervals were checked
  std::optional<int> lattice_size;
  std::size_t requested = 0;
  std::vector<std::uint64_t> replicate_seeds;
  std::vector<std::size_t> failed;             // replicate indices
  std::vector<std::string> failure_messages;
};

/// What one replicate produced for each method.
struct ReplicateOutcome {
  std::vector<std::vector<double>> u;    // [method][phi]
  std::vector<std::vector<int>> covered;  // [method][phi] 0/1, optional
};

/// More than 5% of the replicates failed.
class CalibrationFailure : public std::runtime_error {
 public:
  CalibrationFailure(const std::string& what, std::vector<CalibrationReport> reports)
      : std::runtime_error(what), reports_(std::move(reports)) {}
  const std::vector<CalibrationReport>& reports() const { return reports_; }

 private:
  std::vector<CalibrationReport> reports_;
};

inline constexpr double kMaxFailureFraction = 0.05;

/// Runs `replicate(s, seed_s)` for s = 0..S-1 as independent parallel jobs,
/// with seed_s = derive_seed(seed, s). Each call simulates (theta*, Y*), builds
/// the posterior approximation of every method and returns the U values. The
/// KS uniformity test is then applied per method and functional. Failed
/// replicates are excluded and counted; over 5% failures throws
/// CalibrationFailure carrying the partial reports.
template <class Replicate>
std::vector<CalibrationReport> run_checking_procedure(
    const std::vector<std::string>& methods, const std::vector<std::string>& phis, std::size_t S,
    std::uint64_t seed, int threads, Replicate&& replicate,
    std::optional<int> lattice_size = std::nullopt) {
  if (S == 0) throw std::invalid_argument("run_checking_procedure: S must be >= 1");
  std::vector<ReplicateOutcome> outcomes(S);
  std::vector<std::string> errors(S);
  std::vector<char> ok(S, 0);
  std::vector<std::uint64_t> seeds(S);
  for (std::size_t s = 0; s < S; ++s) seeds[s] = derive_seed(seed, s);

  parallel_for(S, threads, [&](std::size_t s) {
    try {
      outcomes[s] = replicate(s, seeds[s]);
      ok[s] = 1;
    } catch (const std::exception& e) {
      errors[s] = e.what();
    }
  });
  for (std::size_t s = 0; s < S; ++s) {
    if (!ok[s]) continue;
    bool shape = outcomes[s].u.size() == methods.size();
    for (const auto& row : outcomes[s].u) shape = shape && row.size() == phis.size();
    if (!shape) throw std::logic_error("run_checking_procedure: replicate output has the wrong shape");
  }

  std::vector<CalibrationReport> reports(methods.size());
  for (std::size_t k = 0; k < methods.size(); ++k) {
    auto& r = reports[k];
    r.method = methods[k];
    r.phi_names = phis;
    r.lattice_size = lattice_size;
    r.requested = S;
    r.replicate_seeds = seeds;
    r.u.assign(phis.size(), {});
    std::vector<double> hits(phis.size(), 0.0);
    std::size_t cover_count = 0;
    for (std::size_t s = 0; s < S; ++s) {
      if (!ok[s]) {
        r.failed.push_back(s);
        r.failure_messages.push_back(errors[s]);
        continue;
      }
      for (std::size_t f = 0; f < phis.size(); ++f) r.u[f].push_back(outcomes[s].u[k][f]);
      if (outcomes[s].covered.size() == methods.size()) {
        ++cover_count;
        for (std::size_t f = 0; f < phis.size(); ++f) hits[f] += outcomes[s].covered[k][f];
      }
    }
    for (std::size_t f = 0; f < phis.size(); ++f) {
      if (r.u[f].size() >= 10) {
        r.ks.push_back(ks_uniform_test(r.u[f], lattice_size, derive_seed(seed, 1000003 + f)));
      } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.ks.push_back({nan, nan});
      }
    }
    if (cover_count > 0) {
      for (double h : hits) r.coverage.push_back(h / static_cast<double>(cover_count));
    }
  }

  const std::size_t failures = reports.front().failed.size();
  if (static_cast<double>(failures) > kMaxFailureFraction * static_cast<double>(S)) {
    throw CalibrationFailure(std::to_string(failures) + " of " + std::to_string(S) +
                                 " replicates failed",
                             std::move(reports));
  }
  return reports;
}

}  // namespace sbs::calibration
