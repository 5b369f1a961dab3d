#include "sbs/approx/sbmreg_vb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sbs/approx/logistic_fit.hpp"
#include "sbs/math.hpp"

namespace sbs::approx {

int block_index(int k, int l, int g) {
  const int a = std::min(k, l);
  const int b = std::max(k, l);
  return a * g - a * (a - 1) / 2 + (b - a);
}

SbmRegVbApprox::SbmRegVbApprox(Eigen::MatrixXd log_tau, GaussianApprox coef,
                               Eigen::VectorXd dirichlet)
    : log_tau_(std::move(log_tau)), coef_(std::move(coef)), dirichlet_(std::move(dirichlet)) {
  const int g = group_count();
  if (g < 1 || log_tau_.cols() != g || coef_.dim() < block_count(g))
    throw std::invalid_argument("SbmRegVbApprox: inconsistent dimensions");
  if ((dirichlet_.array() <= 0.0).any())
    throw std::invalid_argument("SbmRegVbApprox: Dirichlet parameters must be positive");
  for (Eigen::Index i = 0; i < log_tau_.rows(); ++i) {
    const double top = log_tau_.row(i).maxCoeff();
    log_tau_.row(i).array() -= top + std::log((log_tau_.row(i).array() - top).exp().sum());
  }
}

Eigen::VectorXd SbmRegVbApprox::pack(const State& s, const Permutation& sigma) const {
  const int g = group_count();
  Eigen::VectorXd u(coef_.dim());
  for (int k = 0; k < g; ++k) {
    for (int l = k; l < g; ++l) u(block_index(sigma[k], sigma[l], g)) = s.alpha(k, l);
  }
  u.tail(p()) = s.beta;
  return u;
}

double SbmRegVbApprox::log_density_permuted(const State& s, const Permutation& sigma) const {
  const int g = group_count();
  std::vector<double> dir(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) dir[static_cast<std::size_t>(k)] = dirichlet_(sigma[k]);
  double out = log_dirichlet_density(std::span<const double>(s.pi.data(), g), dir);
  out += coef_.log_density(pack(s, sigma));
  for (Eigen::Index i = 0; i < n(); ++i) out += log_tau_(i, sigma[s.z(i)]);
  return out;
}

SbmRegVbApprox::State SbmRegVbApprox::sample_permuted(const Permutation& sigma, Rng& rng) const {
  const int g = group_count();
  State s;
  s.sigma = sigma;
  std::vector<double> dir(static_cast<std::size_t>(g));
  for (int k = 0; k < g; ++k) dir[static_cast<std::size_t>(k)] = dirichlet_(sigma[k]);
  s.pi.resize(g);
  dirichlet_draw(rng, dir, std::span<double>(s.pi.data(), g));
  const Eigen::VectorXd u = coef_.sample(rng);
  s.alpha.resize(g, g);
  for (int k = 0; k < g; ++k) {
    for (int l = k; l < g; ++l) {
      s.alpha(k, l) = u(block_index(sigma[k], sigma[l], g));
      s.alpha(l, k) = s.alpha(k, l);
    }
  }
  s.beta = u.tail(p());
  s.z.resize(n());
  std::vector<double> mass(static_cast<std::size_t>(g));
  for (Eigen::Index i = 0; i < n(); ++i) {
    for (int k = 0; k < g; ++k) mass[static_cast<std::size_t>(k)] = log_tau_(i, sigma[k]);
    s.z(i) = static_cast<int>(categorical_from_log(rng, mass));
  }
  return s;
}

double SbmRegVbApprox::log_density(const State& s) const {
  return log_density_permuted(s, identity_permutation(group_count()));
}

SbmRegVbApprox::State SbmRegVbApprox::sample(Rng& rng) const {
  return sample_permuted(identity_permutation(group_count()), rng);
}

namespace {

double log_sigmoid(double x) { return -log1pexp(-x); }

// Hard labels from k-means on the leading eigenvectors of the adjacency.
std::vector<int> spectral_labels(const models::EdgeData& data, int g) {
  const Eigen::MatrixXd adj = data.adjacency();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(adj);
  const Eigen::VectorXd& values = eig.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(values.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(values(a)) > std::abs(values(b)); });
  const int n = data.n;
  Eigen::MatrixXd emb(n, g);
  for (int c = 0; c < g; ++c) emb.col(c) = eig.eigenvectors().col(order[static_cast<std::size_t>(c)]);

  // Farthest-point seeding, then Lloyd iterations.
  Eigen::MatrixXd centers(g, g);
  Eigen::Index first = 0;
  emb.rowwise().norm().maxCoeff(&first);
  centers.row(0) = emb.row(first);
  for (int c = 1; c < g; ++c) {
    Eigen::Index far = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      for (int e = 0; e < c; ++e) dmin = std::min(dmin, (emb.row(i) - centers.row(e)).squaredNorm());
      if (dmin > best) {
        best = dmin;
        far = i;
      }
    }
    centers.row(c) = emb.row(far);
  }
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < g; ++c) {
        const double d2 = (emb.row(i) - centers.row(c)).squaredNorm();
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != arg) changed = true;
      labels[static_cast<std::size_t>(i)] = arg;
    }
    if (!changed && it > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g, g);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(g);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += emb.row(i);
      counts(labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < g; ++c) {
      if (counts(c) > 0.0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  return labels;
}

class Fitter {
 public:
  Fitter(const models::EdgeData& data, int g, const SbmRegPriors& priors)
      : data_(data), g_(g), nb_(block_count(g)), p_(static_cast<int>(data.p())), priors_(priors) {
    dim_ = nb_ + p_;
    prior_var_.resize(dim_);
    prior_var_.head(nb_).setConstant(priors.alpha_var);
    prior_var_.tail(p_).setConstant(priors.beta_var);
    const Eigen::Index dyads = data.dyad_count();
    xi_.resize(dyads, nb_);
    mu_.resize(dyads, nb_);
    f_.resize(dyads, nb_);
    for (int k = 0; k < g; ++k) {
      for (int l = k; l < g; ++l) {
        block_k_.push_back(k);
        block_l_.push_back(l);
      }
    }
  }

  SbmRegVbApprox run(Eigen::MatrixXd log_tau, const SbmRegVbOptions& options) {
    log_tau_ = std::move(log_tau);
    refresh_tau();
    dir_ = tau_.colwise().sum().transpose().array() + priors_.d;
    mean_ = Eigen::VectorXd::Zero(dim_);
    cov_ = prior_var_.asDiagonal();
    update_xi();

    std::vector<double> trace;
    for (int it = 0; it < options.max_iterations; ++it) {
      update_coef();
      update_xi();
      update_tau();
      dir_ = tau_.colwise().sum().transpose().array() + priors_.d;
      trace.push_back(elbo());
      if (trace.size() > 1) {
        const double delta = std::abs(trace.back() - trace[trace.size() - 2]);
        if (delta <= options.tolerance * (1.0 + std::abs(trace.back()))) break;
      }
    }
    SbmRegVbApprox out(log_tau_, GaussianApprox(mean_, 0.5 * (cov_ + cov_.transpose())), dir_);
    out.elbo = trace.back();
    out.elbo_trace = std::move(trace);
    return out;
  }

 private:
  void refresh_tau() { tau_ = log_tau_.array().exp(); }

  // Probability that dyad (i, j) falls in block b under q(Z).
  double block_weight(int i, int j, int b) const {
    const int k = block_k_[static_cast<std::size_t>(b)];
    const int l = block_l_[static_cast<std::size_t>(b)];
    if (k == l) return tau_(i, k) * tau_(j, k);
    return tau_(i, k) * tau_(j, l) + tau_(i, l) * tau_(j, k);
  }

  void update_coef() {
    Eigen::MatrixXd prec = prior_var_.cwiseInverse().asDiagonal();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_);
    for (Eigen::Index d = 0; d < data_.dyad_count(); ++d) {
      const auto [i, j] = data_.dyads[static_cast<std::size_t>(d)];
      const Eigen::VectorXd x = data_.x.row(d).transpose();
      const double centered = data_.y(d) - 0.5;
      double ctot = 0.0;
      for (int b = 0; b < nb_; ++b) {
        const double w = block_weight(i, j, b);
        const double c = w * 2.0 * jj_lambda(xi_(d, b));
        ctot += c;
        prec(b, b) += c;
        if (p_ > 0) {
          prec.block(b, nb_, 1, p_) += c * x.transpose();
          prec.block(nb_, b, p_, 1) += c * x;
        }
        rhs(b) += w * centered;
      }
      if (p_ > 0) {
        prec.block(nb_, nb_, p_, p_) += ctot * x * x.transpose();
        rhs.tail(p_) += centered * x;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("fit_vb_sbmreg: precision lost positive definiteness");
    cov_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
    mean_ = llt.solve(rhs);
    const Eigen::MatrixXd lower = llt.matrixL();
    log_det_cov_ = -2.0 * lower.diagonal().array().log().sum();
  }

  // Optimal bound parameters and the per-(dyad, block) expected bound.
  void update_xi() {
    const Eigen::MatrixXd second = cov_ + mean_ * mean_.transpose();
    for (Eigen::Index d = 0; d < data_.dyad_count(); ++d) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(dim_);
      if (p_ > 0) a.tail(p_) = data_.x.row(d).transpose();
      for (int b = 0; b < nb_; ++b) {
        a(b) = 1.0;
        const double m2 = a.dot(second * a);
        const double mu = a.dot(mean_);
        a(b) = 0.0;
        const double xi = std::sqrt(std::max(m2, 0.0));
        xi_(d, b) = xi;
        mu_(d, b) = mu;
        f_(d, b) = log_sigmoid(xi) + (data_.y(d) - 0.5) * mu - 0.5 * xi -
                   jj_lambda(xi) * (m2 - xi * xi);
      }
    }
  }

  Eigen::VectorXd expected_log_pi() const {
    const double total = digamma(dir_.sum());
    return dir_.unaryExpr([&](double v) { return digamma(v) - total; });
  }

  void update_tau() {
    if (g_ == 1) return;
    const Eigen::VectorXd elp = expected_log_pi();
    for (int i = 0; i < data_.n; ++i) {
      Eigen::VectorXd row = elp;
      for (int d : data_.incident[static_cast<std::size_t>(i)]) {
        const auto [a, b] = data_.dyads[static_cast<std::size_t>(d)];
        const int j = (a == i) ? b : a;
        for (int k = 0; k < g_; ++k) {
          for (int l = 0; l < g_; ++l) row(k) += tau_(j, l) * f_(d, block_index(k, l, g_));
        }
      }
      const double top = row.maxCoeff();
      row.array() -= top + std::log((row.array() - top).exp().sum());
      log_tau_.row(i) = row.transpose();
      tau_.row(i) = row.array().exp().transpose();
    }
  }

  double elbo() const {
    double out = 0.0;
    for (Eigen::Index d = 0; d < data_.dyad_count(); ++d) {
      const auto [i, j] = data_.dyads[static_cast<std::size_t>(d)];
      for (int b = 0; b < nb_; ++b) out += block_weight(i, j, b) * f_(d, b);
    }
    const Eigen::VectorXd elp = expected_log_pi();
    out += (tau_ * elp).sum();
    out -= (tau_.array() * log_tau_.array()).sum();
    const double g = static_cast<double>(g_);
    out += log_gamma(g * priors_.d) - g * log_gamma(priors_.d) + (priors_.d - 1.0) * elp.sum();
    out += log_multivariate_beta(std::span<const double>(dir_.data(), dir_.size())) -
           ((dir_.array() - 1.0) * elp.array()).sum();
    const Eigen::VectorXd inv = prior_var_.cwiseInverse();
    const double kl = 0.5 * ((inv.array() * cov_.diagonal().array()).sum() +
                             (inv.array() * mean_.array().square()).sum() -
                             static_cast<double>(dim_) + prior_var_.array().log().sum() -
                             log_det_cov_);
    return out - kl;
  }

  const models::EdgeData& data_;
  int g_;
  int nb_;
  int p_;
  int dim_ = 0;
  SbmRegPriors priors_;
  Eigen::VectorXd prior_var_;
  std::vector<int> block_k_, block_l_;

  Eigen::MatrixXd log_tau_, tau_;
  Eigen::VectorXd dir_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  double log_det_cov_ = 0.0;
  Eigen::MatrixXd xi_, mu_, f_;
};

}  // namespace

SbmRegVbApprox fit_vb_sbmreg(const models::EdgeData& data, int g, const SbmRegPriors& priors,
                             const SbmRegVbOptions& options) {
  if (g < 1) throw std::invalid_argument("fit_vb_sbmreg: g must be >= 1");
  if (data.n < 2 || data.incident.size() != static_cast<std::size_t>(data.n))
    throw std::invalid_argument("fit_vb_sbmreg: network not finalized or too small");
  if (!(priors.alpha_var > 0.0 && priors.beta_var > 0.0 && priors.d > 0.0))
    throw std::invalid_argument("fit_vb_sbmreg: prior parameters must be positive");
  const int n = data.n;

  std::vector<Eigen::MatrixXd> starts;
  if (g == 1) {
    starts.emplace_back(Eigen::MatrixXd::Zero(n, 1));
  } else {
    const auto labels = spectral_labels(data, g);
    Eigen::MatrixXd lt(n, g);
    const double off = std::log(0.1 / (g - 1));
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < g; ++k) lt(i, k) = (labels[static_cast<std::size_t>(i)] == k) ? std::log(0.9) : off;
    }
    starts.push_back(lt);
    std::vector<double> ones(static_cast<std::size_t>(g), 1.0);
    std::vector<double> row(static_cast<std::size_t>(g));
    for (int r = 0; r < options.random_restarts; ++r) {
      Rng rng = make_stream(options.seed, StreamTag::kFit, static_cast<std::uint64_t>(r), 0);
      Eigen::MatrixXd rt(n, g);
      for (int i = 0; i < n; ++i) {
        dirichlet_draw(rng, ones, row);
        for (int k = 0; k < g; ++k) rt(i, k) = std::log(row[static_cast<std::size_t>(k)]);
      }
      starts.push_back(rt);
    }
  }

  SbmRegVbApprox best;
  double best_elbo = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    Fitter fitter(data, g, priors);
    SbmRegVbApprox fit = fitter.run(std::move(start), options);
    if (fit.elbo > best_elbo) {
      best_elbo = fit.elbo;
      best = std::move(fit);
    }
  }
  return best;
}

}  // namespace sbs::approx
