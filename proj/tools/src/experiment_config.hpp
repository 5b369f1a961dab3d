#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbs/approx/gaussian.hpp"
#include "sbs/approx/lca_vb.hpp"
#include "sbs/approx/sbmreg_vb.hpp"
#include "sbs/report.hpp"
#include "sbs/smc/config.hpp"

namespace sbs::cli {

/// Bad configuration values. Exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kLogistic, kLca, kSbmReg, kGaussian };

std::string to_string(ModelKind m);
ModelKind parse_model_kind(const std::string& text);

struct ApproxSpec {
  std::string kind = "vb";  // vb | ml (logistic only)
  approx::Perturbation perturbation{};
  bool symmetrized = true;  // lca / sbmreg
  std::filesystem::path file;  // reuse a fitted approximation instead of fitting
};

struct ExperimentConfig {
  ModelKind model = ModelKind::kLogistic;
  std::filesystem::path data;
  ApproxSpec approx;
  smc::SamplerConfig sampler{};
  int g = 2;
  int g_min = 1;
  int g_max = 3;
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path output_dir = "sbs_out";
  double prior_var = 100.0;  // logistic
  approx::LcaHyper hyper{};
  approx::SbmRegPriors priors{};
  Json calibration = Json::object();  // model-specific checking-procedure settings
};

/// Unknown keys are rejected. `base` supplies the defaults.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
Json to_json(const ExperimentConfig& c);

/// Range checks; also pushes seed and threads into the sampler settings.
void finalize(ExperimentConfig& c);

}  // namespace sbs::cli
