#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "sbs/math.hpp"
#include "sbs/models/conjugate.hpp"
#include "sbs/smc/sampler.hpp"

using namespace sbs;
using namespace sbs::smc;

namespace {

// Three-state toy: prior, likelihood and approximation tabulated.
struct ToyTarget {
  using State = int;
  std::array<double, 3> prior{0.2, 0.5, 0.3};
  std::array<double, 3> lik{0.9, 0.1, 0.4};
  std::array<double, 3> approx{0.6, 0.1, 0.3};

  double log_prior(int s) const { return std::log(prior[s]); }
  double log_lik(int s) const { return std::log(lik[s]); }
  double log_approx(int s) const { return std::log(approx[s]); }
  int sample_approx(Rng& rng) const {
    const double u = uniform01(rng);
    return u < approx[0] ? 0 : (u < approx[0] + approx[1] ? 1 : 2);
  }
  double log_tempered(int s, double rho) const {
    if (rho == 0.0) return log_approx(s);
    return (1 - rho) * log_approx(s) + rho * (log_lik(s) + log_prior(s));
  }
  void move(int& s, double rho, Rng& rng) const {
    const int c = static_cast<int>(rng() % 3);
    if (std::log(uniform01(rng)) < log_tempered(c, rho) - log_tempered(s, rho)) s = c;
  }
  std::array<double, 3> tempered(double rho) const {
    std::array<double, 3> p;
    double z = 0;
    for (int k = 0; k < 3; ++k) z += p[k] = std::exp(log_tempered(k, rho));
    for (auto& v : p) v /= z;
    return p;
  }
  double log_evidence() const {
    double z = 0;
    for (int k = 0; k < 3; ++k) z += prior[k] * lik[k];
    return std::log(z);
  }
};

double chi2_pvalue(const std::array<int, 3>& counts, const std::array<double, 3>& p, int n) {
  double stat = 0;
  for (int k = 0; k < 3; ++k) {
    const double e = n * p[k];
    stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(2), stat));
}

SamplerConfig small_config(std::size_t m, std::uint64_t seed) {
  SamplerConfig c;
  c.particles = m;
  c.master_seed = seed;
  return c;
}

// Samples from the prior (as a start proposal for CBS_IS tests).
struct GaussianStart {
  double mean, var;
  double sample(Rng& rng) const { return mean + std::sqrt(var) * std_normal(rng); }
  double log_density(double x) const { return log_normal_density(x, mean, var); }
};

}  // namespace

static_assert(BridgeTarget<ToyTarget>);
static_assert(BridgeTarget<models::GaussianMeanTarget>);
static_assert(BridgeTarget<models::BetaBinomialTarget>);

TEST(ToyKernel, StationaryAtSeveralTemperatures) {
  const ToyTarget t;
  for (double rho : {0.0, 0.5, 1.0}) {
    const auto p = t.tempered(rho);
    Rng rng(static_cast<std::uint64_t>(rho * 10) + 1000);
    const int n = 20000;
    std::array<int, 3> counts{};
    for (int i = 0; i < n; ++i) {
      const double u = uniform01(rng);
      int s = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
      for (int b = 0; b < 5; ++b) t.move(s, rho, rng);
      ++counts[s];
    }
    EXPECT_GT(chi2_pvalue(counts, p, n), 0.01) << "rho=" << rho;
  }
}

TEST(RunSbs, ToyPosteriorAndEvidence) {
  const ToyTarget t;
  const auto out = run_sbs(t, small_config(5000, 11));
  EXPECT_EQ(out.trace.rho.front(), 0.0);
  EXPECT_EQ(out.trace.rho.back(), 1.0);
  for (std::size_t h = 1; h < out.trace.rho.size(); ++h)
    EXPECT_GT(out.trace.rho[h], out.trace.rho[h - 1]);
  const auto p = t.tempered(1.0);
  std::array<double, 3> mass{};
  for (std::size_t m = 0; m < out.final_cloud.size(); ++m)
    mass[out.final_cloud.particles[m]] += out.final_cloud.norm_weights[m];
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(mass[k], p[k], 0.03);
  EXPECT_NEAR(out.log_evidence_product, t.log_evidence(), 0.05);
  EXPECT_NEAR(out.log_evidence_path, out.log_evidence_product, 0.1);
}

TEST(RunSbs, TraceInvariants) {
  const ToyTarget t;
  SamplerConfig cfg = small_config(500, 3);
  cfg.tau1 = 0.95;
  const auto out = run_sbs(t, cfg);
  const auto& tr = out.trace;
  ASSERT_TRUE(tr.complete());
  EXPECT_EQ(tr.cess.size(), tr.steps());
  EXPECT_EQ(tr.ess.size(), tr.steps());
  EXPECT_EQ(tr.resampled.size(), tr.steps());
  EXPECT_EQ(tr.u.size(), tr.steps() + 1);
  for (std::size_t h = 0; h + 1 < tr.steps(); ++h)
    EXPECT_GE(tr.cess[h], cfg.tau1 * 500 - 1e-6);
  double total = 0;
  for (double w : out.final_cloud.norm_weights) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(RunSbs, ExactApproximationCollapsesToOneStep) {
  const std::vector<double> y{0.3, -1.2, 2.2, 0.8};
  const auto t = models::GaussianMeanTarget::from_posterior(y, 1.5, 0.5, 2.0);
  const auto out = run_sbs(t, small_config(200, 1));
  ASSERT_EQ(out.trace.rho.size(), 2u);
  EXPECT_NEAR(out.log_evidence_product, t.log_evidence(), 1e-10);
  EXPECT_NEAR(out.log_evidence_path, t.log_evidence(), 1e-10);
}

TEST(RunSbs, CbsPosteriorMeanWithinThreeSe) {
  const std::vector<double> y{1.1, 0.4, 2.0, 1.7, 0.9, 1.3};
  const auto t = models::GaussianMeanTarget::from_prior(y, 1.0, 0.0, 4.0);
  const auto out = run_sbs(t, small_config(4000, 21));
  double mean = 0;
  for (std::size_t m = 0; m < out.final_cloud.size(); ++m)
    mean += out.final_cloud.norm_weights[m] * out.final_cloud.particles[m];
  const double ess_final = ess(out.final_cloud.norm_weights);
  EXPECT_LT(std::abs(mean - t.posterior_mean()), 3 * std::sqrt(t.posterior_var() / ess_final));
  EXPECT_GT(out.trace.steps(), 1u);
}

TEST(RunSbs, EvidenceUnbiasedOnExpScale) {
  const auto t = models::BetaBinomialTarget::from_prior(10, 7, 1.0, 1.0);
  const double z = std::exp(t.log_evidence());
  const int runs = 200;
  std::vector<double> v;
  for (int r = 0; r < runs; ++r) v.push_back(std::exp(run_sbs(t, small_config(200, 100 + r)).log_evidence_product));
  double mean = 0, sq = 0;
  for (double x : v) mean += x / runs;
  for (double x : v) sq += (x - mean) * (x - mean) / (runs - 1);
  EXPECT_LT(std::abs(mean - z), 3 * std::sqrt(sq / runs));
}

TEST(RunSbs, DeterministicAcrossThreadCounts) {
  const std::vector<double> y{0.2, 0.9, -0.4};
  const auto t = models::GaussianMeanTarget::from_prior(y, 1.0, 0.0, 9.0);
  SamplerConfig cfg = small_config(777, 99);
  cfg.threads = 1;
  const auto a = run_sbs(t, cfg);
  for (int threads : {2, 4, 8}) {
    cfg.threads = threads;
    const auto b = run_sbs(t, cfg);
    EXPECT_EQ(a.trace.rho, b.trace.rho);
    EXPECT_EQ(a.trace.step_log_ratio, b.trace.step_log_ratio);
    EXPECT_EQ(a.final_cloud.particles, b.final_cloud.particles);
    EXPECT_EQ(a.final_cloud.norm_weights, b.final_cloud.norm_weights);
  }
}

TEST(RunSbs, CbsIsUsesImportanceWeights) {
  const std::vector<double> y{0.2, 0.9, -0.4, 1.5};
  const auto t = models::GaussianMeanTarget::from_prior(y, 1.0, 0.0, 9.0);
  SamplerConfig cfg = small_config(3000, 5);
  cfg.path = PathVariant::kCbsIs;
  const GaussianStart good{t.posterior_mean(), 2 * t.posterior_var()};
  const auto out = run_sbs(t, cfg, good);
  EXPECT_NEAR(out.log_evidence_product, t.log_evidence(), 0.1);
  EXPECT_LT(out.trace.initial_ess, 3000.0);
  // A very narrow, shifted proposal is a poor start: initial ESS collapses.
  const GaussianStart bad{t.posterior_mean() + 1.0, t.posterior_var() / 50};
  const auto poor = run_sbs(t, cfg, bad);
  EXPECT_LT(poor.trace.initial_ess, 0.05 * 3000);
}

TEST(RunSbs, StartProposalRequiresCbsIs) {
  const auto t = models::BetaBinomialTarget::from_prior(5, 2, 1, 1);
  EXPECT_THROW(run_sbs(t, small_config(10, 1), GaussianStart{0.5, 0.01}), std::invalid_argument);
  SamplerConfig cfg = small_config(10, 1);
  cfg.path = PathVariant::kCbsIs;
  EXPECT_THROW(run_sbs(t, cfg), std::invalid_argument);
}

TEST(RunSbs, InvalidConfigRejected) {
  const auto t = models::BetaBinomialTarget::from_prior(5, 2, 1, 1);
  SamplerConfig cfg = small_config(1, 1);
  EXPECT_THROW(run_sbs(t, cfg), std::invalid_argument);
  cfg = small_config(10, 1);
  cfg.tau1 = 0.0;
  EXPECT_THROW(run_sbs(t, cfg), std::invalid_argument);
  cfg.tau1 = 0.5;
  cfg.sweeps = 0;
  EXPECT_THROW(run_sbs(t, cfg), std::invalid_argument);
}

namespace {
struct NanTarget : ToyTarget {
  double log_lik(int s) const { return s == 1 ? std::nan("") : std::log(lik[s]); }
};
ToyTarget with_lik(std::array<double, 3> lik) {
  ToyTarget t;
  t.lik = lik;
  return t;
}
}  // namespace

TEST(RunSbs, NonFiniteDensityAbortsWithParticle) {
  try {
    run_sbs(NanTarget{}, small_config(50, 2));
    FAIL() << "expected NonFiniteDensityError";
  } catch (const NonFiniteDensityError& e) {
    EXPECT_LT(e.particle(), 50u);
  }
}

TEST(RunSbs, ZeroLikelihoodParticlesAreKilled) {
  const ToyTarget t = with_lik({0.9, 0.0, 0.4});
  const auto out = run_sbs(t, small_config(2000, 8));
  for (std::size_t m = 0; m < out.final_cloud.size(); ++m)
    if (out.final_cloud.particles[m] == 1) EXPECT_EQ(out.final_cloud.norm_weights[m], 0.0);
  const double z = std::log(0.2 * 0.9 + 0.3 * 0.4);
  EXPECT_NEAR(out.log_evidence_product, z, 0.05);
}

TEST(RunSbs, TotalCollapseIsDegenerate) {
  EXPECT_THROW(run_sbs(with_lik({0.0, 0.0, 0.0}), small_config(20, 1)), DegenerateCloudError);
}
