#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "sbs/approx/gaussian.hpp"
#include "sbs/approx/logistic_fit.hpp"
#include "sbs/calibration/ustat.hpp"
#include "sbs/math.hpp"
#include "sbs/models/logistic.hpp"
#include "sbs/models/simulate.hpp"
#include "sbs/smc/sampler.hpp"

using namespace sbs;
using approx::GaussianApprox;

namespace {

// Tabulated 1-D density on a fine grid: moments, mode and inverse-CDF draws.
struct Grid1d {
  std::vector<double> x, cdf;
  double mean = 0, var = 0, mode = 0;

  template <class LogDensity>
  Grid1d(double lo, double hi, int points, LogDensity&& f) {
    std::vector<double> lp(points);
    const double h = (hi - lo) / (points - 1);
    double top = -1e300;
    for (int i = 0; i < points; ++i) {
      x.push_back(lo + i * h);
      lp[i] = f(x[i]);
      if (lp[i] > top) {
        top = lp[i];
        mode = x[i];
      }
    }
    double z = 0;
    std::vector<double> w(points);
    for (int i = 0; i < points; ++i) z += w[i] = std::exp(lp[i] - top);
    double acc = 0;
    for (int i = 0; i < points; ++i) {
      w[i] /= z;
      acc += w[i];
      cdf.push_back(acc);
      mean += w[i] * x[i];
    }
    for (int i = 0; i < points; ++i) var += w[i] * (x[i] - mean) * (x[i] - mean);
  }
  double draw(Rng& rng) const {
    const double u = uniform01(rng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return x[std::min<std::size_t>(it - cdf.begin(), x.size() - 1)];
  }
};

std::shared_ptr<models::LogisticData> one_d_data(int n, double theta, std::uint64_t seed) {
  Rng rng(seed);
  auto d = std::make_shared<models::LogisticData>();
  d->x.resize(n, 1);
  d->y.resize(n);
  for (int i = 0; i < n; ++i) {
    d->x(i, 0) = std_normal(rng);
    d->y(i) = uniform01(rng) < 1.0 / (1.0 + std::exp(-theta * d->x(i, 0))) ? 1.0 : 0.0;
  }
  d->names = {"x1"};
  return d;
}

}  // namespace

TEST(GaussianApprox, SampleMomentsMatch) {
  Eigen::VectorXd mu(2);
  mu << 1.0, -2.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 0.5;
  const GaussianApprox g(mu, cov);
  Rng rng(4);
  const int n = 100000;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const auto x = g.sample(rng);
    m += x;
    s += (x - mu) * (x - mu).transpose();
  }
  m /= n;
  s /= n;
  for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(m(k) - mu(k)), 4 * std::sqrt(cov(k, k) / n));
  EXPECT_LT(std::abs(s(0, 0) - 2.0), 4 * 2.0 * std::sqrt(2.0 / n));
  EXPECT_LT(std::abs(s(0, 1) - 0.6), 4 * std::sqrt((2.0 * 0.5 + 0.36) / n));
}

TEST(GaussianApprox, DensityMatchesClosedFormAndRejectsBadCovariance) {
  const auto g = GaussianApprox::isotropic(3, 2.0);
  Eigen::VectorXd x(3);
  x << 0.5, -1.0, 2.0;
  double expected = 0;
  for (int k = 0; k < 3; ++k) expected += log_normal_density(x(k), 0.0, 2.0);
  EXPECT_NEAR(g.log_density(x), expected, 1e-12);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianApprox(Eigen::VectorXd::Zero(2), bad), std::invalid_argument);
  bad << 1.0, 0.1, 0.0, 1.0;
  EXPECT_THROW(GaussianApprox(Eigen::VectorXd::Zero(2), bad), std::invalid_argument);
}

TEST(GaussianApprox, MarginalBlock) {
  Eigen::VectorXd mu(3);
  mu << 1, 2, 3;
  Eigen::MatrixXd cov(3, 3);
  cov << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const auto m = GaussianApprox(mu, cov).marginal(1, 2);
  EXPECT_EQ(m.mean(), mu.tail(2));
  EXPECT_EQ(m.covariance(), cov.bottomRightCorner(2, 2));
}

TEST(PerturbApprox, Variants) {
  Eigen::VectorXd mu(2);
  mu << 0.3, -0.1;
  Eigen::MatrixXd cov(2, 2);
  cov << 0.02, 0.005, 0.005, 0.03;
  const GaussianApprox g(mu, cov);
  const auto shrunk = approx::perturb_approx(g, approx::Perturbation::diag_shrink(5));
  EXPECT_NEAR(shrunk.covariance()(0, 0), 0.004, 1e-15);
  EXPECT_NEAR(shrunk.covariance()(1, 1), 0.006, 1e-15);
  EXPECT_EQ(shrunk.covariance()(0, 1), 0.0);
  EXPECT_EQ(shrunk.mean(), mu);
  const auto inflated = approx::perturb_approx(g, approx::Perturbation::diag_inflate(10));
  EXPECT_NEAR(inflated.covariance()(1, 1), 0.3, 1e-15);
  const auto shifted = approx::perturb_approx(g, approx::Perturbation::shifted(0.5, 5));
  EXPECT_NEAR(shifted.mean()(0), 0.8, 1e-15);
  EXPECT_NEAR(shifted.mean()(1), 0.4, 1e-15);
  EXPECT_NEAR(shifted.covariance()(0, 0), 0.004, 1e-15);
  const auto diag = approx::perturb_approx(shrunk, approx::Perturbation::diag_inflate(1));
  EXPECT_EQ(diag.covariance(), shrunk.covariance());
  EXPECT_EQ(diag.mean(), shrunk.mean());
  EXPECT_THROW(approx::perturb_approx(g, approx::Perturbation::diag_shrink(0)), std::invalid_argument);
}

TEST(LogJointLogistic, HandValues) {
  models::LogisticData d;
  d.x = Eigen::MatrixXd::Ones(1, 1);
  d.y = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd theta(1);
  theta << 2.0;
  EXPECT_NEAR(models::log_joint_logistic(theta, d, 100.0),
              2.0 - std::log1p(std::exp(2.0)) + log_normal_density(2.0, 0.0, 100.0), 1e-12);
  const auto big = one_d_data(30, 1.0, 3);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  EXPECT_NEAR(models::log_lik_logistic(zero, *big), -30 * std::log(2.0), 1e-12);
  models::LogisticData doubled = *big;
  doubled.x = Eigen::MatrixXd(60, 1);
  doubled.x << big->x, big->x;
  doubled.y = Eigen::VectorXd(60);
  doubled.y << big->y, big->y;
  theta << -0.7;
  EXPECT_NEAR(models::log_lik_logistic(theta, doubled), 2 * models::log_lik_logistic(theta, *big),
              1e-10);
  theta << 800.0;  // stable far in the tails
  EXPECT_TRUE(std::isfinite(models::log_lik_logistic(theta, *big)));
}

TEST(FitVbLogistic, NoDataReturnsPrior) {
  const auto g = approx::fit_vb_logistic(Eigen::MatrixXd(0, 3), Eigen::VectorXd(0), 100.0);
  EXPECT_EQ(g.mean(), Eigen::VectorXd::Zero(3));
  EXPECT_TRUE(g.covariance().isApprox(100.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST(FitVbLogistic, OneDimensionalQuadratureOracle) {
  const auto d = one_d_data(50, 1.2, 17);
  const double prior_var = 100.0;
  const Grid1d post(-10, 10, 40001, [&](double t) {
    Eigen::VectorXd v(1);
    v << t;
    return models::log_joint_logistic(v, *d, prior_var);
  });
  const auto fit = approx::fit_vb_logistic_detailed(d->x, d->y, prior_var);
  EXPECT_NEAR(fit.approx.mean()(0), post.mean, 0.05);
  EXPECT_LE(fit.approx.covariance()(0, 0), post.var);
  for (std::size_t i = 1; i < fit.elbo_trace.size(); ++i)
    EXPECT_GE(fit.elbo_trace[i], fit.elbo_trace[i - 1] - 1e-8);

  const auto ml = approx::fit_ml_logistic(d->x, d->y, prior_var);
  EXPECT_NEAR(ml.mean()(0), post.mode, 0.05);
  EXPECT_GE(ml.covariance().trace(), fit.approx.covariance().trace());
}

TEST(FitVbLogistic, MagnitudeOnFourCoefficientDesign) {
  Rng rng(2016);
  Eigen::VectorXd theta(4);
  theta << 0.5, -0.6, 0.0, -1.0;
  auto x = models::gaussian_design(200, 4, rng);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i)
    y(i) = uniform01(rng) < 1.0 / (1.0 + std::exp(-x.row(i).dot(theta))) ? 1.0 : 0.0;
  const auto vb = approx::fit_vb_logistic(x, y, 100.0);
  for (int k = 0; k < 4; ++k) {
    const double sd = std::sqrt(vb.covariance()(k, k));
    EXPECT_GT(sd, 0.1);
    EXPECT_LT(sd, 0.35);
  }
}

TEST(FitMlLogistic, InterceptOnlyClosedForm) {
  const int n = 40, k = 13;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  y.head(k).setOnes();
  const auto ml = approx::fit_ml_logistic(x, y, std::numeric_limits<double>::infinity());
  const double p = double(k) / n;
  EXPECT_NEAR(ml.mean()(0), std::log(p / (1 - p)), 1e-6);
  EXPECT_NEAR(ml.covariance()(0, 0), 1.0 / (n * p * (1 - p)), 1e-6);
}

TEST(FitMlLogistic, ErrorsOnEmptyAndSeparated) {
  EXPECT_THROW(approx::fit_ml_logistic(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), 100.0),
               std::invalid_argument);
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  EXPECT_THROW(approx::fit_ml_logistic(x, y, std::numeric_limits<double>::infinity()),
               approx::SeparationError);
}

class LogisticKernel : public ::testing::TestWithParam<double> {};

// Exact draws from p_rho (tabulated), B kernel sweeps, then a two-sample KS
// test against fresh exact draws.
TEST_P(LogisticKernel, PreservesTemperedTarget) {
  const double rho = GetParam();
  const auto d = one_d_data(40, -0.8, 23);
  const double prior_var = 100.0;
  const auto vb = approx::fit_vb_logistic(d->x, d->y, prior_var);
  const auto ml = approx::fit_ml_logistic(d->x, d->y, prior_var);
  const models::LogisticTarget target(d, prior_var, vb, ml.covariance());
  const Grid1d tempered(-6, 6, 24001, [&](double t) {
    Eigen::VectorXd v(1);
    v << t;
    return target.tempered_log_density(v, rho);
  });
  Rng rng(static_cast<std::uint64_t>(1000 * rho) + 1);
  const int n = 5000;
  std::vector<double> moved, fresh;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd t(1);
    t << tempered.draw(rng);
    for (int b = 0; b < 5; ++b) target.move(t, rho, rng);
    moved.push_back(t(0));
    fresh.push_back(tempered.draw(rng));
  }
  EXPECT_GT(calibration::ks_two_sample(moved, fresh).p_value, 0.01) << "rho=" << rho;
}

INSTANTIATE_TEST_SUITE_P(Rho, LogisticKernel, ::testing::Values(0.0, 0.5, 1.0));

TEST(LogisticTarget, RhoZeroMatchesDirectApproxDraws) {
  const auto d = one_d_data(40, 0.4, 5);
  const auto vb = approx::fit_vb_logistic(d->x, d->y, 100.0);
  const models::LogisticTarget target(d, 100.0, vb, vb.covariance());
  Rng rng(77);
  std::vector<double> moved, direct;
  for (int i = 0; i < 5000; ++i) {
    auto t = target.sample_approx(rng);
    for (int b = 0; b < 5; ++b) target.move(t, 0.0, rng);
    moved.push_back(t(0));
    direct.push_back(vb.sample(rng)(0));
  }
  EXPECT_GT(calibration::ks_two_sample(moved, direct).p_value, 0.01);
}

TEST(LogisticTarget, SbsRecoversQuadraturePosterior) {
  const auto d = one_d_data(60, 1.0, 31);
  const double prior_var = 100.0;
  const auto vb = approx::fit_vb_logistic(d->x, d->y, prior_var);
  const auto ml = approx::fit_ml_logistic(d->x, d->y, prior_var);
  const models::LogisticTarget target(d, prior_var, vb, ml.covariance());
  smc::SamplerConfig cfg;
  cfg.particles = 3000;
  cfg.master_seed = 12;
  const auto out = smc::run_sbs(target, cfg);
  double mean = 0;
  for (std::size_t m = 0; m < out.final_cloud.size(); ++m)
    mean += out.final_cloud.norm_weights[m] * out.final_cloud.particles[m](0);
  double log_z = 0;
  const Grid1d post(-10, 10, 40001, [&](double t) {
    Eigen::VectorXd v(1);
    v << t;
    return models::log_joint_logistic(v, *d, prior_var);
  });
  {
    // evidence by direct quadrature
    std::vector<double> terms;
    const double h = 20.0 / 40000;
    for (double t = -10; t <= 10; t += h) {
      Eigen::VectorXd v(1);
      v << t;
      terms.push_back(models::log_joint_logistic(v, *d, prior_var) + std::log(h));
    }
    log_z = log_sum_exp(terms);
  }
  EXPECT_NEAR(mean, post.mean, 4 * std::sqrt(post.var / 3000) + 0.01);
  EXPECT_NEAR(out.log_evidence_product, log_z, 0.05);
}

TEST(SimulateLogistic, ReproducibleAndBinary) {
  Rng a(9), b(9);
  models::LogisticDesign design{models::gaussian_design(30, 2, a), 1.0};
  models::LogisticDesign design_b{models::gaussian_design(30, 2, b), 1.0};
  const auto pa = models::simulate_prior_predictive(design, a);
  const auto pb = models::simulate_prior_predictive(design_b, b);
  EXPECT_EQ(pa.theta, pb.theta);
  EXPECT_EQ(pa.data.y, pb.data.y);
  for (Eigen::Index i = 0; i < pa.data.y.size(); ++i)
    EXPECT_TRUE(pa.data.y(i) == 0.0 || pa.data.y(i) == 1.0);
}
