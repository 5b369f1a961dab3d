#include "sbs/models/sbmreg.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "sbs/math.hpp"

namespace sbs::models {

void EdgeData::finalize() {
  if (n < 2) throw std::invalid_argument("EdgeData: need at least two nodes");
  const auto count = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  if (dyads.size() != count)
    throw std::invalid_argument("EdgeData: expected " + std::to_string(count) +
                                " dyads, got " + std::to_string(dyads.size()));
  if (y.size() != static_cast<Eigen::Index>(count) || x.rows() != static_cast<Eigen::Index>(count))
    throw std::invalid_argument("EdgeData: y / x length differs from the dyad count");
  std::set<std::pair<int, int>> seen;
  incident.assign(static_cast<std::size_t>(n), {});
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    auto [i, j] = dyads[d];
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n || i == j) throw std::invalid_argument("EdgeData: invalid dyad index");
    if (!seen.insert({i, j}).second) throw std::invalid_argument("EdgeData: duplicated dyad");
    if (y(static_cast<Eigen::Index>(d)) != 0.0 && y(static_cast<Eigen::Index>(d)) != 1.0)
      throw std::invalid_argument("EdgeData: responses must be 0/1");
    dyads[d] = {i, j};
    incident[static_cast<std::size_t>(i)].push_back(static_cast<int>(d));
    incident[static_cast<std::size_t>(j)].push_back(static_cast<int>(d));
  }
  if (names.size() != static_cast<std::size_t>(x.cols())) {
    names.clear();
    for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c + 1));
  }
}

Eigen::MatrixXd EdgeData::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    const auto [i, j] = dyads[d];
    a(i, j) = a(j, i) = y(static_cast<Eigen::Index>(d));
  }
  return a;
}

double log_lik_sbmreg(const SbmRegState& s, const EdgeData& data) {
  const Eigen::VectorXd xb = data.x * s.beta;
  double out = 0.0;
  for (std::size_t d = 0; d < data.dyads.size(); ++d) {
    const auto [i, j] = data.dyads[d];
    const auto di = static_cast<Eigen::Index>(d);
    out += bernoulli_logit_lpmf(data.y(di) > 0.5, s.alpha(s.z(i), s.z(j)) + xb(di));
  }
  return out;
}

double log_prior_sbmreg(const SbmRegState& s, const SbmRegPriors& priors) {
  const auto g = s.pi.size();
  double out = 0.0;
  for (Eigen::Index i = 0; i < s.z.size(); ++i) out += std::log(s.pi(s.z(i)));
  std::vector<double> dir(static_cast<std::size_t>(g), priors.d);
  out += log_dirichlet_density(std::span<const double>(s.pi.data(), g), dir);
  for (Eigen::Index k = 0; k < g; ++k) {
    for (Eigen::Index l = k; l < g; ++l) out += log_normal_density(s.alpha(k, l), 0.0, priors.alpha_var);
  }
  for (Eigen::Index c = 0; c < s.beta.size(); ++c)
    out += log_normal_density(s.beta(c), 0.0, priors.beta_var);
  return out;
}

double log_joint_sbmreg(const SbmRegState& s, const EdgeData& data, const SbmRegPriors& priors) {
  return log_lik_sbmreg(s, data) + log_prior_sbmreg(s, priors);
}

SbmRegTarget::SbmRegTarget(std::shared_ptr<const EdgeData> data, SbmRegPriors priors,
                           approx::SbmRegVbApprox vb, bool symmetrized)
    : data_(std::move(data)), priors_(priors), sym_(std::move(vb)), symmetrized_(symmetrized) {
  if (!data_) throw std::invalid_argument("SbmRegTarget: null data");
  const auto& base = sym_.base();
  if (base.n() != data_->n || base.p() != data_->p())
    throw std::invalid_argument("SbmRegTarget: approximation does not match the data");
  const int g = group_count();
  const int nb = approx::block_count(g);
  const Eigen::MatrixXd& cov = base.coef_gauss().covariance();
  for (const auto& sigma : sym_.permutations()) {
    std::vector<int> map(static_cast<std::size_t>(nb));
    for (int k = 0; k < g; ++k) {
      for (int l = k; l < g; ++l)
        map[static_cast<std::size_t>(approx::block_index(k, l, g))] =
            approx::block_index(sigma[k], sigma[l], g);
    }
    Eigen::MatrixXd c(nb, nb);
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) c(a, b) = cov(map[static_cast<std::size_t>(a)], map[static_cast<std::size_t>(b)]);
    }
    alpha_chol_.push_back(Eigen::LLT<Eigen::MatrixXd>(c).matrixL());
  }
  if (base.p() > 0) {
    beta_chol_ = Eigen::LLT<Eigen::MatrixXd>(cov.bottomRightCorner(base.p(), base.p())).matrixL();
  }
}

double SbmRegTarget::log_prior(const State& s) const {
  const double p = log_prior_sbmreg(s, priors_);
  return symmetrized_ ? p - sym_.log_perm_count() : p;
}

double SbmRegTarget::log_approx(const State& s) const {
  if (symmetrized_) return sym_.log_joint_density(s, s.sigma);
  return sym_.base().log_density_permuted(s, s.sigma);
}

SbmRegTarget::State SbmRegTarget::sample_approx(Rng& rng) const {
  if (symmetrized_) return sym_.sample(rng);
  return sym_.base().sample(rng);
}

void SbmRegTarget::move(State& s, double rho, Rng& rng) const {
  if (symmetrized_) update_sigma(s, rho, rng);
  update_z(s, rho, rng);
  update_pi(s, rho, rng);
  update_alpha(s, rho, rng);
  update_beta(s, rho, rng);
}

void SbmRegTarget::update_sigma(State& s, double rho, Rng& rng) const {
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

void SbmRegTarget::update_z(State& s, double rho, Rng& rng) const {
  const EdgeData& data = *data_;
  const auto& log_tau = sym_.base().log_assign_probs();
  const int g = group_count();
  Eigen::VectorXd xb;
  if (rho > 0.0) xb = data.x * s.beta;
  std::vector<double> mass(static_cast<std::size_t>(g));
  for (int i = 0; i < data.n; ++i) {
    for (int k = 0; k < g; ++k) {
      double m = (rho < 1.0) ? (1.0 - rho) * log_tau(i, s.sigma[k]) : 0.0;
      if (rho > 0.0) {
        double ll = std::log(s.pi(k));
        for (int d : data.incident[static_cast<std::size_t>(i)]) {
          const auto [a, b] = data.dyads[static_cast<std::size_t>(d)];
          const int j = (a == i) ? b : a;
          ll += bernoulli_logit_lpmf(data.y(d) > 0.5, s.alpha(k, s.z(j)) + xb(d));
        }
        m += rho * ll;
      }
      mass[static_cast<std::size_t>(k)] = m;
    }
    s.z(i) = static_cast<int>(categorical_from_log(rng, mass));
  }
}

void SbmRegTarget::update_pi(State& s, double rho, Rng& rng) const {
  const auto& dirichlet = sym_.base().pi_dirichlet();
  const int g = group_count();
  std::vector<double> count(static_cast<std::size_t>(g), 0.0);
  for (Eigen::Index i = 0; i < s.z.size(); ++i) count[static_cast<std::size_t>(s.z(i))] += 1.0;
  std::vector<double> dir(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) {
    dir[static_cast<std::size_t>(k)] = (1.0 - rho) * dirichlet(s.sigma[k]) +
                                       rho * (priors_.d + count[static_cast<std::size_t>(k)]);
  }
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), g));
}

double SbmRegTarget::coef_log_target(const State& s, double rho) const {
  double out = 0.0;
  if (rho < 1.0) out += (1.0 - rho) * sym_.base().coef_gauss().log_density(sym_.base().pack(s, s.sigma));
  if (rho > 0.0) {
    const int g = group_count();
    double lp = log_lik_sbmreg(s, *data_);
    for (int k = 0; k < g; ++k) {
      for (int l = k; l < g; ++l) lp += log_normal_density(s.alpha(k, l), 0.0, priors_.alpha_var);
    }
    for (Eigen::Index c = 0; c < s.beta.size(); ++c)
      lp += log_normal_density(s.beta(c), 0.0, priors_.beta_var);
    out += rho * lp;
  }
  return out;
}

std::size_t SbmRegTarget::perm_slot(const Permutation& sigma) const {
  const auto& perms = sym_.permutations();
  const auto it = std::find(perms.begin(), perms.end(), sigma);
  if (it == perms.end()) throw std::invalid_argument("SbmRegTarget: invalid permutation in state");
  return static_cast<std::size_t>(it - perms.begin());
}

namespace {

double pick_scale(Rng& rng) {
  auto c = static_cast<std::size_t>(uniform01(rng) * SbmRegTarget::kProposalScales.size());
  return std::sqrt(SbmRegTarget::kProposalScales[std::min<std::size_t>(c, 2)]);
}

}  // namespace

bool SbmRegTarget::update_alpha(State& s, double rho, Rng& rng) const {
  const int g = group_count();
  const int nb = approx::block_count(g);
  const Eigen::MatrixXd& chol = alpha_chol_[perm_slot(s.sigma)];
  const double scale = pick_scale(rng);
  Eigen::VectorXd eps(nb);
  for (int a = 0; a < nb; ++a) eps(a) = std_normal(rng);
  const Eigen::VectorXd step = scale * (chol * eps);

  State prop = s;
  for (int k = 0; k < g; ++k) {
    for (int l = k; l < g; ++l) {
      prop.alpha(k, l) += step(approx::block_index(k, l, g));
      prop.alpha(l, k) = prop.alpha(k, l);
    }
  }
  const double log_ratio = coef_log_target(prop, rho) - coef_log_target(s, rho);
  if (std::log(uniform01(rng)) < log_ratio) {
    s.alpha = std::move(prop.alpha);
    return true;
  }
  return false;
}

bool SbmRegTarget::update_beta(State& s, double rho, Rng& rng) const {
  const Eigen::Index p = s.beta.size();
  if (p == 0) return false;
  const double scale = pick_scale(rng);
  Eigen::VectorXd eps(p);
  for (Eigen::Index c = 0; c < p; ++c) eps(c) = std_normal(rng);
  State prop = s;
  prop.beta += scale * (beta_chol_ * eps);
  const double log_ratio = coef_log_target(prop, rho) - coef_log_target(s, rho);
  if (std::log(uniform01(rng)) < log_ratio) {
    s.beta = std::move(prop.beta);
    return true;
  }
  return false;
}

}  // namespace sbs::models
