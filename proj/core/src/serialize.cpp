#include "sbs/approx/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "sbs/data_io.hpp"

namespace sbs::approx {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector: expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string approx_kind(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("approximation: missing kind");
  return j.at("kind").get<std::string>();
}

namespace {

void expect_kind(const Json& j, const std::string& kind) {
  if (approx_kind(j) != kind)
    throw std::invalid_argument("approximation: expected kind '" + kind + "', got '" +
                                approx_kind(j) + "'");
}

}  // namespace

Json to_json(const GaussianApprox& a) {
  return Json{{"kind", "gaussian"},
              {"mean", vector_to_json(a.mean())},
              {"covariance", matrix_to_json(a.covariance())}};
}

Json to_json(const LcaVbApprox& a) {
  return Json{{"kind", "lca_vb"},
              {"groups", a.group_count()},
              {"elbo", a.elbo},
              {"dirichlet", vector_to_json(a.dirichlet_params())},
              {"beta_a", matrix_to_json(a.alpha())},
              {"beta_b", matrix_to_json(a.beta())},
              {"log_assign_probs", matrix_to_json(a.log_assign_probs())}};
}

Json to_json(const SbmRegVbApprox& a) {
  return Json{{"kind", "sbmreg_vb"},
              {"groups", a.group_count()},
              {"elbo", a.elbo},
              {"dirichlet", vector_to_json(a.pi_dirichlet())},
              {"coef_mean", vector_to_json(a.coef_gauss().mean())},
              {"coef_covariance", matrix_to_json(a.coef_gauss().covariance())},
              {"log_assign_probs", matrix_to_json(a.log_assign_probs())}};
}

// Missing keys and type mismatches surface as std::invalid_argument.
template <class F>
auto guarded(const char* kind, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string(kind) + ": " + e.what());
  }
}

GaussianApprox gaussian_from_json(const Json& j) {
  expect_kind(j, "gaussian");
  return guarded("gaussian", [&] {
    return GaussianApprox(vector_from_json(j.at("mean")), matrix_from_json(j.at("covariance")));
  });
}

LcaVbApprox lca_vb_from_json(const Json& j) {
  expect_kind(j, "lca_vb");
  return guarded("lca_vb", [&] {
    LcaVbApprox out(vector_from_json(j.at("dirichlet")), matrix_from_json(j.at("beta_a")),
                    matrix_from_json(j.at("beta_b")), matrix_from_json(j.at("log_assign_probs")));
    out.elbo = j.value("elbo", 0.0);
    return out;
  });
}

SbmRegVbApprox sbmreg_vb_from_json(const Json& j) {
  expect_kind(j, "sbmreg_vb");
  return guarded("sbmreg_vb", [&] {
    SbmRegVbApprox out(matrix_from_json(j.at("log_assign_probs")),
                       GaussianApprox(vector_from_json(j.at("coef_mean")),
                                      matrix_from_json(j.at("coef_covariance"))),
                       vector_from_json(j.at("dirichlet")));
    out.elbo = j.value("elbo", 0.0);
    return out;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace sbs::approx
