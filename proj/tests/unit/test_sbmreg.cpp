#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "sbs/approx/logistic_fit.hpp"
#include "sbs/approx/sbmreg_vb.hpp"
#include "sbs/math.hpp"
#include "sbs/models/logistic.hpp"
#include "sbs/models/sbmreg.hpp"
#include "sbs/models/simulate.hpp"
#include "sbs/smc/sampler.hpp"

using namespace sbs;
using approx::SbmRegPriors;
using models::EdgeData;
using models::SbmRegState;

namespace {

EdgeData make_network(int n, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  EdgeData d;
  d.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d.dyads.emplace_back(i, j);
  d.x = x;
  d.y = y;
  d.finalize();
  return d;
}

SbmRegState random_state(int n, int p, int g, Rng& rng) {
  SbmRegState s;
  s.z.resize(n);
  for (int i = 0; i < n; ++i) s.z(i) = static_cast<int>(rng() % g);
  s.alpha.resize(g, g);
  for (int k = 0; k < g; ++k)
    for (int l = k; l < g; ++l) s.alpha(k, l) = s.alpha(l, k) = 2 * std_normal(rng);
  s.beta.resize(p);
  for (int c = 0; c < p; ++c) s.beta(c) = std_normal(rng);
  s.pi.resize(g);
  std::vector<double> ones(g, 1.0);
  dirichlet_draw(rng, ones, std::span<double>(s.pi.data(), g));
  s.sigma = approx::identity_permutation(g);
  return s;
}

SbmRegState relabel(const SbmRegState& s, const models::Permutation& perm) {
  SbmRegState out = s;
  const int g = static_cast<int>(perm.size());
  for (Eigen::Index i = 0; i < s.z.size(); ++i) out.z(i) = perm[s.z(i)];
  for (int k = 0; k < g; ++k) {
    out.pi(perm[k]) = s.pi(k);
    for (int l = 0; l < g; ++l) out.alpha(perm[k], perm[l]) = s.alpha(k, l);
  }
  return out;
}

std::shared_ptr<const EdgeData> simulated(int n, int p, int g, std::uint64_t seed,
                                          SbmRegState* truth = nullptr) {
  Rng rng(seed);
  models::SbmRegDesign design;
  design.n = n;
  design.p = p;
  design.g = g;
  auto pp = models::simulate_prior_predictive(design, rng);
  if (truth) *truth = pp.theta;
  return std::make_shared<const EdgeData>(std::move(pp.data));
}

// Exact posterior mean of beta for a 4-node, one-covariate, two-group network:
// sum over the 16 label vectors (pi integrated analytically) and a grid over
// (alpha_11, alpha_12, alpha_22, beta).
double enumerate_beta_mean(const EdgeData& d, const SbmRegPriors& pr) {
  const int na = 33, nb = 81;
  const double alo = -8, ahi = 8, blo = -5, bhi = 5;
  std::vector<double> av(na), bv(nb);
  for (int i = 0; i < na; ++i) av[i] = alo + (ahi - alo) * i / (na - 1);
  for (int i = 0; i < nb; ++i) bv[i] = blo + (bhi - blo) * i / (nb - 1);
  double top = -1e300, z = 0, m = 0;  // running log-sum-exp
  for (int mask = 0; mask < 16; ++mask) {
    int counts[2] = {0, 0};
    int lab[4];
    for (int i = 0; i < 4; ++i) ++counts[lab[i] = (mask >> i) & 1];
    const double log_pz = log_gamma(pr.d + counts[0]) + log_gamma(pr.d + counts[1]) -
                          2 * log_gamma(pr.d) + log_gamma(2 * pr.d) - log_gamma(2 * pr.d + 4);
    for (double a11 : av)
      for (double a12 : av)
        for (double a22 : av)
          for (double b : bv) {
            const double alpha[2][2] = {{a11, a12}, {a12, a22}};
            double lm = log_pz + log_normal_density(a11, 0, pr.alpha_var) +
                        log_normal_density(a12, 0, pr.alpha_var) +
                        log_normal_density(a22, 0, pr.alpha_var) +
                        log_normal_density(b, 0, pr.beta_var);
            for (std::size_t k = 0; k < d.dyads.size(); ++k) {
              const auto [i, j] = d.dyads[k];
              lm += bernoulli_logit_lpmf(d.y(k) > 0.5, alpha[lab[i]][lab[j]] + d.x(k, 0) * b);
            }
            if (lm > top) {
              const double scale = std::exp(top - lm);
              z *= scale;
              m *= scale;
              top = lm;
            }
            const double w = std::exp(lm - top);
            z += w;
            m += w * b;
          }
  }
  return m / z;
}

EdgeData tiny_network();

double enumerated_beta_mean(const EdgeData& d, const SbmRegPriors& pr) {
  static const double cached = enumerate_beta_mean(tiny_network(), SbmRegPriors{});
  (void)d;
  (void)pr;
  return cached;
}

EdgeData tiny_network() {
  Eigen::MatrixXd x(6, 1);
  x << 1.2, -0.8, 0.3, -1.5, 0.9, 0.1;
  Eigen::VectorXd y(6);
  y << 1, 0, 1, 0, 1, 1;
  return make_network(4, x, y);
}

}  // namespace

TEST(BlockIndex, PacksUpperTriangle) {
  EXPECT_EQ(approx::block_index(0, 0, 3), 0);
  EXPECT_EQ(approx::block_index(0, 2, 3), 2);
  EXPECT_EQ(approx::block_index(2, 0, 3), 2);
  EXPECT_EQ(approx::block_index(1, 1, 3), 3);
  EXPECT_EQ(approx::block_index(2, 2, 3), 5);
  EXPECT_EQ(approx::block_count(3), 6);
}

TEST(EdgeData, ValidatesDyads) {
  EdgeData d;
  d.n = 3;
  d.dyads = {{0, 1}, {0, 2}, {0, 1}};
  d.x = Eigen::MatrixXd::Zero(3, 1);
  d.y = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(d.finalize(), std::invalid_argument);
  d.dyads = {{0, 1}, {0, 2}, {1, 2}};
  d.y(1) = 2;
  EXPECT_THROW(d.finalize(), std::invalid_argument);
  d.y(1) = 1;
  d.finalize();
  EXPECT_EQ(d.adjacency()(2, 0), 1.0);
  EXPECT_EQ(d.incident[1].size(), 2u);
}

TEST(LogJointSbmReg, CoinFlipGraph) {
  const auto d = simulated(6, 2, 1, 1);
  SbmRegState s;
  s.z = Eigen::VectorXi::Zero(6);
  s.alpha = Eigen::MatrixXd::Zero(1, 1);
  s.beta = Eigen::VectorXd::Zero(2);
  s.pi = Eigen::VectorXd::Ones(1);
  s.sigma = {0};
  const SbmRegPriors pr;
  const double priors = log_normal_density(0, 0, pr.alpha_var) + 2 * log_normal_density(0, 0, pr.beta_var);
  EXPECT_NEAR(models::log_joint_sbmreg(s, *d, pr), -15 * std::log(2.0) + priors, 1e-12);
}

TEST(LogJointSbmReg, SingleGroupIsDyadLogistic) {
  const auto d = simulated(7, 2, 1, 2);
  Rng rng(3);
  const auto s = random_state(7, 2, 1, rng);
  models::LogisticData ld;
  ld.x.resize(d->dyad_count(), 3);
  ld.x << Eigen::VectorXd::Ones(d->dyad_count()), d->x;
  ld.y = d->y;
  Eigen::VectorXd theta(3);
  theta << s.alpha(0, 0), s.beta;
  EXPECT_NEAR(models::log_lik_sbmreg(s, *d), models::log_lik_logistic(theta, ld), 1e-10);
}

TEST(LogJointSbmReg, HandCaseThreeNodes) {
  Eigen::MatrixXd x(3, 1);
  x << 0.5, -1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 1, 0, 1;
  const auto d = make_network(3, x, y);
  SbmRegState s;
  s.z.resize(3);
  s.z << 0, 1, 1;
  s.alpha.resize(2, 2);
  s.alpha << 0.3, -0.4, -0.4, 1.1;
  s.beta = Eigen::VectorXd::Constant(1, 0.7);
  s.pi.resize(2);
  s.pi << 0.25, 0.75;
  s.sigma = {0, 1};
  const SbmRegPriors pr{4.0, 1.0, 2.0};
  auto lsig = [](double e, int yy) { return yy * e - std::log1p(std::exp(e)); };
  double expected = lsig(-0.4 + 0.35, 1) + lsig(-0.4 - 0.7, 0) + lsig(1.1 + 1.4, 1);
  expected += std::log(0.25) + 2 * std::log(0.75);
  expected += std::log(6.0 * 0.25 * 0.75);  // Dir(2, 2) density
  for (double a : {0.3, -0.4, 1.1}) expected += -0.5 * std::log(2 * M_PI * 4.0) - a * a / 8.0;
  expected += -0.5 * std::log(2 * M_PI) - 0.49 / 2;
  EXPECT_NEAR(models::log_joint_sbmreg(s, d, pr), expected, 1e-12);
}

TEST(LogJointSbmReg, ExchangeableUnderRelabeling) {
  const auto d = simulated(9, 2, 3, 4);
  Rng rng(5);
  for (int r = 0; r < 20; ++r) {
    const auto s = random_state(9, 2, 3, rng);
    for (const auto& perm : approx::all_permutations(3))
      EXPECT_NEAR(models::log_joint_sbmreg(relabel(s, perm), *d, {}),
                  models::log_joint_sbmreg(s, *d, {}), 1e-12);
  }
}

TEST(FitVbSbmReg, SingleGroupMatchesLogisticVb) {
  const auto d = simulated(12, 2, 1, 6);
  const SbmRegPriors pr{1.0, 1.0, 2.0};
  approx::SbmRegVbOptions opt;
  opt.tolerance = 1e-15;
  opt.max_iterations = 5000;
  const auto vb = approx::fit_vb_sbmreg(*d, 1, pr, opt);
  Eigen::MatrixXd x(d->dyad_count(), 3);
  x << Eigen::VectorXd::Ones(d->dyad_count()), d->x;
  approx::LogisticVbOptions lopt;
  lopt.tolerance = 1e-15;
  const auto lr = approx::fit_vb_logistic_detailed(x, d->y, 1.0, lopt).approx;
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(vb.coef_gauss().mean()(c), lr.mean()(c), 1e-6);
  EXPECT_TRUE(vb.coef_gauss().covariance().isApprox(lr.covariance(), 1e-6));
}

TEST(FitVbSbmReg, ElboMonotoneAndNormalized) {
  const auto d = simulated(20, 3, 2, 7);
  const auto vb = approx::fit_vb_sbmreg(*d, 2, {});
  for (std::size_t i = 1; i < vb.elbo_trace.size(); ++i)
    EXPECT_GE(vb.elbo_trace[i], vb.elbo_trace[i - 1] - 1e-8 * std::abs(vb.elbo_trace[i]));
  const auto tau = vb.assign_probs();
  for (Eigen::Index i = 0; i < tau.rows(); ++i) EXPECT_NEAR(tau.row(i).sum(), 1.0, 1e-12);
  EXPECT_TRUE((vb.pi_dirichlet().array() > 0).all());
  EXPECT_EQ(vb.alpha_gauss().dim(), 3);
  EXPECT_EQ(vb.beta_gauss().dim(), 3);
}

TEST(FitVbSbmReg, PaperScaleFitIsFast) {
  for (int g : {1, 2}) {
    const auto d = simulated(20, 3, g, 8 + g);
    const auto t0 = std::chrono::steady_clock::now();
    approx::fit_vb_sbmreg(*d, 2, {});
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
  }
}

TEST(FitVbSbmReg, TinyNetworkBetaNearEnumeration) {
  const auto d = tiny_network();
  const SbmRegPriors pr;
  const double exact = enumerated_beta_mean(d, pr);
  const auto vb = approx::fit_vb_sbmreg(d, 2, pr);
  EXPECT_NEAR(vb.beta_gauss().mean()(0), exact, 0.2);
}

TEST(SbmRegApprox, SampleMomentsMatchAndPermutedDensityConsistent) {
  const auto d = simulated(10, 2, 2, 12);
  const auto vb = approx::fit_vb_sbmreg(*d, 2, {});
  Rng rng(13);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) sum += vb.sample(rng).beta;
  const auto beta = vb.beta_gauss();
  for (int c = 0; c < 2; ++c)
    EXPECT_LT(std::abs(sum(c) / n - beta.mean()(c)), 4 * std::sqrt(beta.covariance()(c, c) / n));
  const auto sym = approx::SbmRegSymmetrized(vb);
  for (int r = 0; r < 20; ++r) {
    const auto s = random_state(10, 2, 2, rng);
    for (const auto& perm : approx::all_permutations(2))
      EXPECT_NEAR(sym.log_density(relabel(s, perm)), sym.log_density(s), 1e-9);
  }
}

TEST(SbmRegTarget, RhoZeroKeepsVbMoments) {
  const auto d = simulated(10, 2, 2, 14);
  const auto vb = approx::fit_vb_sbmreg(*d, 2, {});
  for (bool sym : {false, true}) {
    const models::SbmRegTarget t(d, {}, vb, sym);
    Rng rng(15);
    const int n = 4000;
    double m_moved = 0, m_direct = 0, v = 0;
    double pm_moved = 0, pm_direct = 0, pv = 0;
    for (int i = 0; i < n; ++i) {
      auto s = t.sample_approx(rng);
      for (int b = 0; b < 5; ++b) t.move(s, 0.0, rng);
      const auto r = t.sample_approx(rng);
      m_moved += s.beta(0) / n;
      m_direct += r.beta(0) / n;
      v += r.beta(0) * r.beta(0) / n;
      pm_moved += s.pi(0) / n;
      pm_direct += r.pi(0) / n;
      pv += r.pi(0) * r.pi(0) / n;
    }
    v -= m_direct * m_direct;
    pv -= pm_direct * pm_direct;
    EXPECT_LT(std::abs(m_moved - m_direct), 4 * std::sqrt(2 * v / n)) << "sym=" << sym;
    EXPECT_LT(std::abs(pm_moved - pm_direct), 4 * std::sqrt(2 * pv / n)) << "sym=" << sym;
  }
}

TEST(SbmRegTarget, RhoOneLongRunMatchesEnumeration) {
  const auto d = std::make_shared<const EdgeData>(tiny_network());
  const SbmRegPriors pr;
  const double exact = enumerated_beta_mean(*d, pr);
  const auto vb = approx::fit_vb_sbmreg(*d, 2, pr);
  const models::SbmRegTarget t(d, pr, vb, false);
  Rng rng(16);
  auto s = t.sample_approx(rng);
  for (int i = 0; i < 2000; ++i) t.move(s, 1.0, rng);
  double mean = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    t.move(s, 1.0, rng);
    mean += s.beta(0) / n;
  }
  EXPECT_NEAR(mean, exact, 0.1);
}

TEST(SbmRegTarget, SbsEvidenceIsFiniteAndBetaMatchesEnumeration) {
  const auto d = std::make_shared<const EdgeData>(tiny_network());
  const SbmRegPriors pr;
  const double exact = enumerated_beta_mean(*d, pr);
  const auto vb = approx::fit_vb_sbmreg(*d, 2, pr);
  const models::SbmRegTarget t(d, pr, vb, true);
  smc::SamplerConfig cfg;
  cfg.particles = 3000;
  cfg.master_seed = 2;
  const auto out = smc::run_sbs(t, cfg);
  double mean = 0;
  for (std::size_t m = 0; m < out.final_cloud.size(); ++m)
    mean += out.final_cloud.norm_weights[m] * out.final_cloud.particles[m].beta(0);
  EXPECT_NEAR(mean, exact, 0.1);
  EXPECT_TRUE(std::isfinite(out.log_evidence_product));
}

TEST(SimulateSbmReg, ReproducibleAndWellFormed) {
  SbmRegState a, b;
  const auto da = simulated(15, 3, 2, 20, &a);
  const auto db = simulated(15, 3, 2, 20, &b);
  EXPECT_EQ(da->y, db->y);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(da->dyad_count(), 105);
  EXPECT_TRUE(a.alpha.isApprox(a.alpha.transpose()));
  EXPECT_NEAR(a.pi.sum(), 1.0, 1e-12);
}
