#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "sbs/approx/gaussian.hpp"
#include "sbs/approx/lca_vb.hpp"
#include "sbs/approx/sbmreg_vb.hpp"

namespace sbs::approx {

using Json = nlohmann::json;

/// Matrices are stored as arrays of rows.
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

/// Every document carries a "kind" tag: "gaussian", "lca_vb" or "sbmreg_vb".
Json to_json(const GaussianApprox& a);
Json to_json(const LcaVbApprox& a);
Json to_json(const SbmRegVbApprox& a);

/// Throw std::invalid_argument on a wrong kind or malformed content.
GaussianApprox gaussian_from_json(const Json& j);
LcaVbApprox lca_vb_from_json(const Json& j);
SbmRegVbApprox sbmreg_vb_from_json(const Json& j);

std::string approx_kind(const Json& j);

/// Reads a JSON document; throws sbs::IoError when unreadable or unparsable.
Json read_json_file(const std::filesystem::path& path);

}  // namespace sbs::approx
