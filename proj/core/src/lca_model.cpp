#include "sbs/models/lca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs::models {

double log_lik_lca(const LcaState& s, const Eigen::MatrixXd& y) {
  // Sufficient statistics per class: successes per item and class sizes.
  const Eigen::Index g = s.gamma.rows();
  Eigen::MatrixXd succ = Eigen::MatrixXd::Zero(g, y.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(g);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    succ.row(s.z(i)) += y.row(i);
    count(s.z(i)) += 1.0;
  }
  double out = 0.0;
  for (Eigen::Index k = 0; k < g; ++k) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      const double a = succ(k, j), b = count(k) - succ(k, j);
      if (a > 0.0) out += a * std::log(s.gamma(k, j));
      if (b > 0.0) out += b * std::log1p(-s.gamma(k, j));
    }
  }
  return out;
}

double log_prior_lca(const LcaState& s, const LcaHyper& hyper) {
  const auto g = s.pi.size();
  double out = 0.0;
  for (Eigen::Index i = 0; i < s.z.size(); ++i) out += std::log(s.pi(s.z(i)));
  std::vector<double> dir(static_cast<std::size_t>(g), hyper.d);
  out += log_dirichlet_density(std::span<const double>(s.pi.data(), g), dir);
  const double log_b = log_beta_fn(hyper.a, hyper.b);
  for (Eigen::Index k = 0; k < s.gamma.rows(); ++k) {
    for (Eigen::Index j = 0; j < s.gamma.cols(); ++j) {
      const double x = s.gamma(k, j);
      if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
      out += (hyper.a - 1.0) * std::log(x) + (hyper.b - 1.0) * std::log1p(-x) - log_b;
    }
  }
  return out;
}

double log_joint_lca(const LcaState& s, const Eigen::MatrixXd& y, const LcaHyper& hyper) {
  return log_lik_lca(s, y) + log_prior_lca(s, hyper);
}

LcaTarget::LcaTarget(std::shared_ptr<const Eigen::MatrixXd> y, LcaHyper hyper,
                     approx::LcaVbApprox vb, bool symmetrized)
    : y_(std::move(y)), hyper_(hyper), sym_(std::move(vb)), symmetrized_(symmetrized) {
  if (!y_) throw std::invalid_argument("LcaTarget: null data");
  if (sym_.base().n() != y_->rows() || sym_.base().q() != y_->cols())
    throw std::invalid_argument("LcaTarget: approximation does not match the data");
}

double LcaTarget::log_prior(const State& s) const {
  const double p = log_prior_lca(s, hyper_);
  return symmetrized_ ? p - sym_.log_perm_count() : p;
}

double LcaTarget::log_approx(const State& s) const {
  if (symmetrized_) return sym_.log_joint_density(s, s.sigma);
  return sym_.base().log_density_permuted(s, s.sigma);
}

LcaTarget::State LcaTarget::sample_approx(Rng& rng) const {
  if (symmetrized_) return sym_.sample(rng);
  return sym_.base().sample(rng);
}

void LcaTarget::move(State& s, double rho, Rng& rng) const {
  if (symmetrized_) update_sigma(s, rho, rng);
  update_z(s, rho, rng);
  update_gamma(s, rho, rng);
  update_pi(s, rho, rng);
}

void LcaTarget::update_sigma(State& s, double rho, Rng& rng) const {
  const auto& perms = sym_.permutations();
  std::size_t idx = 0;
  if (rho >= 1.0) {
    idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(perms.size()));
    if (idx >= perms.size()) idx = perms.size() - 1;
  } else {
    auto mass = sym_.component_log_densities(s);
    for (auto& v : mass) v *= (1.0 - rho);
    idx = categorical_from_log(rng, mass);
  }
  s.sigma = perms[idx];
}

void LcaTarget::update_z(State& s, double rho, Rng& rng) const {
  const Eigen::MatrixXd& y = *y_;
  const auto& log_tau = sym_.base().log_assign_probs();
  const int g = group_count();
  Eigen::MatrixXd lik;
  if (rho > 0.0) {
    const Eigen::MatrixXd lg = s.gamma.array().log();
    const Eigen::MatrixXd l1g = (-s.gamma.array()).log1p();
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(y.rows(), y.cols());
    lik = y * lg.transpose() + (ones - y) * l1g.transpose();
    const Eigen::RowVectorXd lpi = s.pi.array().log().transpose();
    lik.rowwise() += lpi;
  }
  std::vector<double> mass(static_cast<std::size_t>(g));
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (int k = 0; k < g; ++k) {
      double m = (rho < 1.0) ? (1.0 - rho) * log_tau(i, s.sigma[k]) : 0.0;
      if (rho > 0.0) m += rho * lik(i, k);
      mass[static_cast<std::size_t>(k)] = m;
    }
    s.z(i) = static_cast<int>(categorical_from_log(rng, mass));
  }
}

void LcaTarget::update_gamma(State& s, double rho, Rng& rng) const {
  const Eigen::MatrixXd& y = *y_;
  const auto& vb = sym_.base();
  const int g = group_count();
  Eigen::MatrixXd succ = Eigen::MatrixXd::Zero(g, y.cols());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(g);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    succ.row(s.z(i)) += y.row(i);
    count(s.z(i)) += 1.0;
  }
  for (int k = 0; k < g; ++k) {
    const int c = s.sigma[k];
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      const double s1 = (1.0 - rho) * vb.alpha()(c, j) + rho * (hyper_.a + succ(k, j));
      const double s2 = (1.0 - rho) * vb.beta()(c, j) + rho * (hyper_.b + count(k) - succ(k, j));
      s.gamma(k, j) = beta_draw(rng, s1, s2);
    }
  }
}

void LcaTarget::update_pi(State& s, double rho, Rng& rng) const {
  const auto& vb = sym_.base();
  const int g = group_count();
  std::vector<double> count(static_cast<std::size_t>(g), 0.0);
  for (Eigen::Index i = 0; i < s.z.size(); ++i) count[static_cast<std::size_t>(s.z(i))] += 1.0;
  std::vector<double> dir(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) {
    dir[static_cast<std::size_t>(k)] = (1.0 - rho) * vb.dirichlet_params()(s.sigma[k]) +
                                       rho * (hyper_.d + count[static_cast<std::size_t>(k)]);
  }
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), g));
}

}  // namespace sbs::models
