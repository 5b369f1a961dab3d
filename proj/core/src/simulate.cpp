#include "sbs/models/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "sbs/approx/symmetrized.hpp"

namespace sbs::models {

namespace {

double bernoulli_logit_draw(Rng& rng, double eta) {
  return uniform01(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
}

}  // namespace

Eigen::MatrixXd gaussian_design(int n, int p, Rng& rng) {
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) x(i, c) = std_normal(rng);
  }
  return x;
}

PriorPredictive<Eigen::VectorXd, LogisticData> simulate_prior_predictive(
    const LogisticDesign& design, Rng& rng) {
  const Eigen::Index p = design.x.cols();
  PriorPredictive<Eigen::VectorXd, LogisticData> out;
  out.theta.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) out.theta(c) = std::sqrt(design.prior_var) * std_normal(rng);
  out.data.x = design.x;
  out.data.y.resize(design.x.rows());
  const Eigen::VectorXd eta = design.x * out.theta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) out.data.y(i) = bernoulli_logit_draw(rng, eta(i));
  for (Eigen::Index c = 0; c < p; ++c) out.data.names.push_back("x" + std::to_string(c + 1));
  return out;
}

PriorPredictive<LcaState, Eigen::MatrixXd> simulate_prior_predictive(const LcaDesign& design,
                                                                     Rng& rng) {
  if (design.g < 1 || design.n < 1 || design.q < 1)
    throw std::invalid_argument("simulate_prior_predictive: bad LCA design");
  const auto& h = design.hyper;
  PriorPredictive<LcaState, Eigen::MatrixXd> out;
  LcaState& s = out.theta;
  s.sigma = approx::identity_permutation(design.g);
  s.pi.resize(design.g);
  std::vector<double> dir(static_cast<std::size_t>(design.g), h.d);
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), design.g));
  s.gamma.resize(design.g, design.q);
  for (int k = 0; k < design.g; ++k) {
    for (int j = 0; j < design.q; ++j) s.gamma(k, j) = beta_draw(rng, h.a, h.b);
  }
  s.z.resize(design.n);
  std::vector<double> log_pi(static_cast<std::size_t>(design.g));
  for (int k = 0; k < design.g; ++k) log_pi[static_cast<std::size_t>(k)] = std::log(s.pi(k));
  out.data.resize(design.n, design.q);
  for (int i = 0; i < design.n; ++i) {
    s.z(i) = static_cast<int>(categorical_from_log(rng, log_pi));
    for (int j = 0; j < design.q; ++j) out.data(i, j) = uniform01(rng) < s.gamma(s.z(i), j) ? 1.0 : 0.0;
  }
  return out;
}

PriorPredictive<SbmRegState, EdgeData> simulate_prior_predictive(const SbmRegDesign& design,
                                                                 Rng& rng) {
  if (design.g < 1 || design.n < 2 || design.p < 0)
    throw std::invalid_argument("simulate_prior_predictive: bad SBM-reg design");
  const auto& pr = design.priors;
  const int n = design.n;
  const int g = design.g;
  const Eigen::Index dcount = static_cast<Eigen::Index>(n) * (n - 1) / 2;

  PriorPredictive<SbmRegState, EdgeData> out;
  EdgeData& data = out.data;
  data.n = n;
  if (design.covariates.size() > 0) {
    if (design.covariates.rows() != dcount || design.covariates.cols() != design.p)
      throw std::invalid_argument("simulate_prior_predictive: covariate matrix has wrong shape");
    data.x = design.covariates;
  } else {
    data.x = gaussian_design(static_cast<int>(dcount), design.p, rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) data.dyads.emplace_back(i, j);
  }

  SbmRegState& s = out.theta;
  s.sigma = approx::identity_permutation(g);
  s.pi.resize(g);
  std::vector<double> dir(static_cast<std::size_t>(g), pr.d);
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), g));
  s.alpha.resize(g, g);
  for (int k = 0; k < g; ++k) {
    for (int l = k; l < g; ++l) {
      s.alpha(k, l) = std::sqrt(pr.alpha_var) * std_normal(rng);
      s.alpha(l, k) = s.alpha(k, l);
    }
  }
  s.beta.resize(design.p);
  for (int c = 0; c < design.p; ++c) s.beta(c) = std::sqrt(pr.beta_var) * std_normal(rng);
  std::vector<double> log_pi(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) log_pi[static_cast<std::size_t>(k)] = std::log(s.pi(k));
  s.z.resize(n);
  for (int i = 0; i < n; ++i) s.z(i) = static_cast<int>(categorical_from_log(rng, log_pi));

  data.y.resize(dcount);
  const Eigen::VectorXd xb = data.x * s.beta;
  for (Eigen::Index d = 0; d < dcount; ++d) {
    const auto [i, j] = data.dyads[static_cast<std::size_t>(d)];
    data.y(d) = bernoulli_logit_draw(rng, s.alpha(s.z(i), s.z(j)) + xb(d));
  }
  data.finalize();
  return out;
}

}  // namespace sbs::models
