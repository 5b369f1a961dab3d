#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbs/models/edge_data.hpp"
#include "sbs/models/logistic.hpp"

namespace sbs {

/// File could not be opened, read or parsed. The message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header row required; the column named `y` is the response, every other
/// column a covariate (include an explicit intercept column if wanted).
models::LogisticData read_logistic_csv(const std::filesystem::path& path);
void write_logistic_csv(const std::filesystem::path& path, const models::LogisticData& data);

/// Binary n x q matrix; an optional non-numeric header row is skipped.
Eigen::MatrixXd read_lca_csv(const std::filesystem::path& path);
void write_lca_csv(const std::filesystem::path& path, const Eigen::MatrixXd& y);

/// Dyad list `i,j,y,x1..xp` with a header row, all unordered pairs present.
/// Node ids are 1-based in the file.
models::EdgeData read_edge_csv(const std::filesystem::path& path);
void write_edge_csv(const std::filesystem::path& path, const models::EdgeData& data);

/// Shortest round-trip decimal representation, '.' separator.
std::string format_double(double v);

/// One row per particle: weight, then the flattened parameter vector.
void write_sample_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      std::span<const double> weights,
                      const std::vector<std::vector<double>>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sbs
