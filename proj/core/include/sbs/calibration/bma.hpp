#pragma once

#include <span>
#include <string>
#include <vector>

namespace sbs::calibration {

/// softmax(log_evidence + log_prior_g). An empty prior means uniform.
std::vector<double> model_posterior(std::span<const double> log_evidence,
                                    std::span<const double> log_prior_g = {});

struct BmaMoments {
  double mean = 0.0;
  double within_var = 0.0;
  double between_var = 0.0;
  double sd = 0.0;
  double ratio = 0.0;  // mean / sd
};

/// Law-of-total-variance split of a model-averaged parameter.
BmaMoments bma_moments(std::span<const double> per_g_mean, std::span<const double> per_g_var,
                       std::span<const double> p_g);

struct BmaSummary {
  std::vector<int> groups;             // g values, aligned with model_posterior
  std::vector<double> model_posterior;
  std::vector<double> log_evidence;    // product estimator per g
  std::vector<double> log_evidence_path;
  std::vector<std::string> names;      // parameter names
  std::vector<BmaMoments> moments;     // one per name
};

}  // namespace sbs::calibration
