#pragma once

#include "experiment_config.hpp"

namespace sbs::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kIo = 2;
inline constexpr int kDegenerate = 3;
inline constexpr int kCalibration = 4;

int cmd_fit_approx(const ExperimentConfig& c);
int cmd_sample(const ExperimentConfig& c);
int cmd_model_select(const ExperimentConfig& c);
int cmd_calibrate(const ExperimentConfig& c);

}  // namespace sbs::cli
