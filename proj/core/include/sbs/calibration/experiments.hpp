#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbs/approx/lca_vb.hpp"
#include "sbs/approx/sbmreg_vb.hpp"
#include "sbs/calibration/bma.hpp"
#include "sbs/calibration/checking.hpp"
#include "sbs/models/sbmreg.hpp"
#include "sbs/models/simulate.hpp"
#include "sbs/smc/sampler.hpp"

// Ready-made checking procedures for the built-in models, and the per-g
// model selection pipeline for networks.
namespace sbs::calibration {

struct WeightedMoments {
  double mean = 0.0;
  double var = 0.0;
};
WeightedMoments weighted_moments(std::span<const double> values, std::span<const double> weights);

/// Approximation-only methods use `approx_draws` uniform-weight draws; the
/// sampler methods run SBS with `sampler` (its seed is replaced per replicate).
struct LcaCalibrationConfig {
  models::LcaDesign design{};
  std::size_t replicates = 100;
  std::size_t approx_draws = 1000;
  smc::SamplerConfig sampler{};
  approx::LcaVbOptions vb{};
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<int> lattice_size;
};
/// VB, VB.Sym, SBS-from-VB, SBS-from-VB.Sym on |pi_1 - pi_2| and pi_1.
std::vector<CalibrationReport> calibrate_lca(const LcaCalibrationConfig& config);

/// Replicate s is simulated with g* = true_groups[s % size]; every replicate is
/// fitted for g = 1..g_max and the regression coefficients are model-averaged.
struct SbmRegCalibrationConfig {
  int n = 20;
  int p = 3;
  std::vector<int> true_groups{1, 2};
  int g_max = 3;
  approx::SbmRegPriors priors{};
  std::size_t replicates = 50;
  std::size_t approx_draws = 1000;
  smc::SamplerConfig sampler{};
  approx::SbmRegVbOptions vb{};
  bool symmetrized = true;
  double level = 0.95;
  std::uint64_t seed = 1;
  int threads = 1;
};
/// VB (p(g|Y) from the ELBO) and SBS (p(g|Y) from the product estimator) on beta_1..beta_p,
/// with interval coverage at `level`.
std::vector<CalibrationReport> calibrate_sbmreg(const SbmRegCalibrationConfig& config);

struct LogisticCalibrationConfig {
  int n = 100;
  int p = 2;
  double prior_var = 1.0;
  std::size_t replicates = 100;
  std::size_t approx_draws = 1000;
  smc::SamplerConfig sampler{};
  std::uint64_t seed = 1;
  int threads = 1;
};
/// VB and SBS-from-VB on each coordinate theta_j.
std::vector<CalibrationReport> calibrate_logistic(const LogisticCalibrationConfig& config);

/// Conjugate normal mean: the exact posterior CDF against SBS started from a
/// reference offset by one posterior sd with twice the posterior variance.
struct GaussianCalibrationConfig {
  int n = 10;
  double noise_var = 1.0;
  double prior_mean = 0.0;
  double prior_var = 1.0;
  std::size_t replicates = 100;
  smc::SamplerConfig sampler{};
  std::uint64_t seed = 1;
  int threads = 1;
};
std::vector<CalibrationReport> calibrate_gaussian_mean(const GaussianCalibrationConfig& config);

struct ModelSelectConfig {
  std::vector<int> groups{1, 2, 3};
  approx::SbmRegPriors priors{};
  smc::SamplerConfig sampler{};
  approx::SbmRegVbOptions vb{};
  bool symmetrized = true;
};

struct GroupRun {
  int g = 0;
  approx::SbmRegVbApprox vb;
  smc::SamplerOutput<models::SbmRegState> output;
};

/// Runs that completed before a failure are kept; `error` names the failing g.
struct ModelSelectResult {
  std::vector<GroupRun> runs;
  BmaSummary summary;
  std::optional<int> failed_g;
  std::string error;
};

/// Per g: VB fit, SBS from the (symmetrized) fit, product-estimator evidence;
/// then p(g|Y) under a uniform prior on g and BMA moments of beta.
/// Seeds of the per-g fits and runs are derived from the configured seeds and g.
ModelSelectResult model_select_sbmreg(std::shared_ptr<const models::EdgeData> data,
                                      const ModelSelectConfig& config);

/// BMA summary of beta from finished runs (uniform prior over their g values).
BmaSummary summarize_runs(const std::vector<GroupRun>& runs,
                          const std::vector<std::string>& beta_names);

}  // namespace sbs::calibration
