#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sbs::models {

/// Undirected binary network with covariates on every unordered dyad.
struct EdgeData {
  int n = 0;                              // nodes
  std::vector<std::pair<int, int>> dyads;  // (i, j) with i < j, 0-based
  Eigen::VectorXd y;                       // 0/1 per dyad
  Eigen::MatrixXd x;                       // dyads x p covariates
  std::vector<std::string> names;          // covariate names
  std::vector<std::vector<int>> incident;  // dyad indices touching each node

  Eigen::Index dyad_count() const { return static_cast<Eigen::Index>(dyads.size()); }
  Eigen::Index p() const { return x.cols(); }

  /// Validates indices, checks every unordered pair appears once and fills `incident`.
  void finalize();

  Eigen::MatrixXd adjacency() const;
};

}  // namespace sbs::models
