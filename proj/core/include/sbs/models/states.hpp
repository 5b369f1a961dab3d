#pragma once

#include <vector>

#include <Eigen/Core>

namespace sbs::models {

/// Labels are 0-based throughout.
using Permutation = std::vector<int>;

struct LcaState {
  Eigen::VectorXi z;      // n class labels
  Eigen::MatrixXd gamma;  // g x q success probabilities
  Eigen::VectorXd pi;     // g class proportions
  Permutation sigma;      // state label k is matched to approximation component sigma[k]
};

struct SbmRegState {
  Eigen::VectorXi z;      // n block labels
  Eigen::MatrixXd alpha;  // g x g symmetric block effects
  Eigen::VectorXd beta;   // p covariate effects
  Eigen::VectorXd pi;     // g block proportions
  Permutation sigma;
};

}  // namespace sbs::models
