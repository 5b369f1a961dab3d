#include "sbs/approx/lca_vb.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs::approx {

namespace {

void log_normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double top = m.row(i).maxCoeff();
    const double lse = top + std::log((m.row(i).array() - top).exp().sum());
    m.row(i).array() -= lse;
  }
}

struct Expectations {
  Eigen::VectorXd log_pi;     // E log pi_k
  Eigen::MatrixXd log_g;      // E log gamma_kj
  Eigen::MatrixXd log_1mg;    // E log (1 - gamma_kj)
};

Expectations expectations(const Eigen::VectorXd& dir, const Eigen::MatrixXd& al,
                          const Eigen::MatrixXd& be) {
  Expectations e;
  const double dsum = digamma(dir.sum());
  e.log_pi = dir.unaryExpr([&](double v) { return digamma(v) - dsum; });
  e.log_g.resize(al.rows(), al.cols());
  e.log_1mg.resize(al.rows(), al.cols());
  for (Eigen::Index k = 0; k < al.rows(); ++k) {
    for (Eigen::Index j = 0; j < al.cols(); ++j) {
      const double tot = digamma(al(k, j) + be(k, j));
      e.log_g(k, j) = digamma(al(k, j)) - tot;
      e.log_1mg(k, j) = digamma(be(k, j)) - tot;
    }
  }
  return e;
}

// n x g matrix of E log p(y_i, Z_i = k | gamma, pi).
Eigen::MatrixXd expected_log_lik(const Eigen::MatrixXd& y, const Expectations& e) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(y.rows(), y.cols());
  Eigen::MatrixXd out = y * e.log_g.transpose() + (ones - y) * e.log_1mg.transpose();
  out.rowwise() += e.log_pi.transpose();
  return out;
}

void update_globals(const Eigen::MatrixXd& y, const LcaHyper& h, const Eigen::MatrixXd& tau,
                    Eigen::VectorXd& dir, Eigen::MatrixXd& al, Eigen::MatrixXd& be) {
  const Eigen::VectorXd nk = tau.colwise().sum().transpose();
  const Eigen::MatrixXd sk = tau.transpose() * y;  // g x q
  dir = nk.array() + h.d;
  al = sk.array() + h.a;
  be = (-sk).colwise() + nk;
  be.array() += h.b;
}

}  // namespace

LcaVbApprox::LcaVbApprox(Eigen::VectorXd dirichlet, Eigen::MatrixXd alpha, Eigen::MatrixXd beta,
                         Eigen::MatrixXd log_tau)
    : dirichlet_(std::move(dirichlet)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      log_tau_(std::move(log_tau)) {
  const Eigen::Index g = dirichlet_.size();
  if (g < 1 || alpha_.rows() != g || beta_.rows() != g || alpha_.cols() != beta_.cols() ||
      log_tau_.cols() != g)
    throw std::invalid_argument("LcaVbApprox: inconsistent dimensions");
  if ((dirichlet_.array() <= 0.0).any() || (alpha_.array() <= 0.0).any() ||
      (beta_.array() <= 0.0).any())
    throw std::invalid_argument("LcaVbApprox: parameters must be positive");
  log_normalize_rows(log_tau_);
  log_norm_ = -log_multivariate_beta(std::span<const double>(dirichlet_.data(), g));
  for (Eigen::Index k = 0; k < g; ++k)
    for (Eigen::Index j = 0; j < alpha_.cols(); ++j) log_norm_ -= log_beta_fn(alpha_(k, j), beta_(k, j));
}

double LcaVbApprox::log_density_permuted(const State& s, const Permutation& sigma) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const int g = group_count();
  double out = log_norm_;
  for (int k = 0; k < g; ++k) {
    if (s.pi(k) <= 0.0) return kNegInf;
    out += (dirichlet_(sigma[k]) - 1.0) * std::log(s.pi(k));
    for (Eigen::Index j = 0; j < q(); ++j) {
      const double x = s.gamma(k, j);
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      out += (alpha_(sigma[k], j) - 1.0) * std::log(x) + (beta_(sigma[k], j) - 1.0) * std::log1p(-x);
    }
  }
  for (Eigen::Index i = 0; i < n(); ++i) out += log_tau_(i, sigma[s.z(i)]);
  return out;
}

LcaVbApprox::State LcaVbApprox::sample_permuted(const Permutation& sigma, Rng& rng) const {
  const int g = group_count();
  State s;
  s.sigma = sigma;
  std::vector<double> dir(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) dir[static_cast<std::size_t>(k)] = dirichlet_(sigma[k]);
  s.pi.resize(g);
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), g));
  s.gamma.resize(g, q());
  for (int k = 0; k < g; ++k) {
    for (Eigen::Index j = 0; j < q(); ++j)
      s.gamma(k, j) = beta_draw(rng, alpha_(sigma[k], j), beta_(sigma[k], j));
  }
  s.z.resize(n());
  std::vector<double> mass(static_cast<std::size_t>(g));
  for (Eigen::Index i = 0; i < n(); ++i) {
    for (int k = 0; k < g; ++k) mass[static_cast<std::size_t>(k)] = log_tau_(i, sigma[k]);
    s.z(i) = static_cast<int>(categorical_from_log(rng, mass));
  }
  return s;
}

double LcaVbApprox::log_density(const State& s) const {
  return log_density_permuted(s, identity_permutation(group_count()));
}

LcaVbApprox::State LcaVbApprox::sample(Rng& rng) const {
  return sample_permuted(identity_permutation(group_count()), rng);
}

double lca_elbo(const Eigen::MatrixXd& y, const LcaHyper& h, const LcaVbApprox& q) {
  const auto& dir = q.dirichlet_params();
  const auto& al = q.alpha();
  const auto& be = q.beta();
  const Eigen::MatrixXd& log_tau = q.log_assign_probs();
  const Eigen::MatrixXd tau = log_tau.array().exp();
  const Expectations e = expectations(dir, al, be);
  const auto g = static_cast<double>(dir.size());

  double out = (tau.array() * expected_log_lik(y, e).array()).sum();
  out -= (tau.array() * log_tau.array()).sum();
  out += log_gamma(g * h.d) - g * log_gamma(h.d) + (h.d - 1.0) * e.log_pi.sum();
  out += -static_cast<double>(al.size()) * log_beta_fn(h.a, h.b) +
         (h.a - 1.0) * e.log_g.sum() + (h.b - 1.0) * e.log_1mg.sum();
  out += log_multivariate_beta(std::span<const double>(dir.data(), dir.size())) -
         ((dir.array() - 1.0) * e.log_pi.array()).sum();
  for (Eigen::Index k = 0; k < al.rows(); ++k) {
    for (Eigen::Index j = 0; j < al.cols(); ++j) {
      out += log_beta_fn(al(k, j), be(k, j)) - (al(k, j) - 1.0) * e.log_g(k, j) -
             (be(k, j) - 1.0) * e.log_1mg(k, j);
    }
  }
  return out;
}

LcaVbApprox fit_vb_lca(const Eigen::MatrixXd& y, int g, const LcaHyper& hyper,
                       const LcaVbOptions& options) {
  if (g < 1) throw std::invalid_argument("fit_vb_lca: g must be >= 1");
  if (!(hyper.d > 0.0 && hyper.a > 0.0 && hyper.b > 0.0))
    throw std::invalid_argument("fit_vb_lca: hyper-parameters must be positive");
  if (((y.array() != 0.0) && (y.array() != 1.0)).any())
    throw std::invalid_argument("fit_vb_lca: responses must be 0/1");
  const Eigen::Index n = y.rows();
  const int restarts = (g == 1) ? 1 : std::max(1, options.restarts);

  LcaVbApprox best;
  double best_elbo = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_stream(options.seed, StreamTag::kFit, static_cast<std::uint64_t>(r), 0);
    Eigen::MatrixXd log_tau(n, g);
    std::vector<double> ones(static_cast<std::size_t>(g), 1.0);
    std::vector<double> row(static_cast<std::size_t>(g));
    for (Eigen::Index i = 0; i < n; ++i) {
      dirichlet_draw(rng, ones, row);
      for (int k = 0; k < g; ++k) log_tau(i, k) = std::log(row[static_cast<std::size_t>(k)]);
    }
    log_normalize_rows(log_tau);

    Eigen::VectorXd dir;
    Eigen::MatrixXd al, be;
    update_globals(y, hyper, log_tau.array().exp().matrix(), dir, al, be);
    LcaVbApprox current(dir, al, be, log_tau);
    std::vector<double> trace{lca_elbo(y, hyper, current)};

    for (int it = 0; it < options.max_iterations; ++it) {
      log_tau = expected_log_lik(y, expectations(dir, al, be));
      log_normalize_rows(log_tau);
      update_globals(y, hyper, log_tau.array().exp().matrix(), dir, al, be);
      current = LcaVbApprox(dir, al, be, log_tau);
      trace.push_back(lca_elbo(y, hyper, current));
      if (std::abs(trace.back() - trace[trace.size() - 2]) < options.tolerance) break;
    }
    current.elbo = trace.back();
    current.elbo_trace = std::move(trace);
    if (current.elbo > best_elbo) {
      best_elbo = current.elbo;
      best = std::move(current);
    }
  }
  return best;
}

}  // namespace sbs::approx
