#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "sbs/smc/errors.hpp"
#include "sbs/smc/particle_cloud.hpp"
#include "sbs/smc/trace.hpp"
#include "sbs/smc/weights.hpp"

using namespace sbs;
using namespace sbs::smc;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}  // namespace

TEST(NormalizeLogWeights, Uniform) {
  const auto r = normalize_log_weights(std::vector<double>{0, 0, 0, 0});
  for (double w : r.weights) EXPECT_DOUBLE_EQ(w, 0.25);
  EXPECT_NEAR(r.log_sum, std::log(4.0), 1e-15);
}

TEST(NormalizeLogWeights, TwoEntries) {
  const auto r = normalize_log_weights(std::vector<double>{0, std::log(3.0)});
  EXPECT_NEAR(r.weights[0], 0.25, 1e-15);
  EXPECT_NEAR(r.weights[1], 0.75, 1e-15);
  EXPECT_NEAR(r.log_sum, std::log(4.0), 1e-15);
}

TEST(NormalizeLogWeights, Singleton) {
  const auto r = normalize_log_weights(std::vector<double>{-7.5});
  EXPECT_EQ(r.weights[0], 1.0);
  EXPECT_EQ(r.log_sum, -7.5);
}

TEST(NormalizeLogWeights, ShiftInvariantAndHugeValues) {
  std::vector<double> lw{1.0, -3.0, 2.5, -kInf, 0.1};
  auto base = normalize_log_weights(lw);
  for (double c : {-1e4, 1e3, 7e5}) {
    auto shifted = lw;
    for (auto& v : shifted) v += c;
    auto r = normalize_log_weights(shifted);
    for (std::size_t i = 0; i < lw.size(); ++i) EXPECT_NEAR(r.weights[i], base.weights[i], 1e-14 * std::max(1.0, std::abs(c)));
    EXPECT_NEAR(r.log_sum - c, base.log_sum, 1e-9 * std::max(1.0, std::abs(c)));
  }
  EXPECT_EQ(base.weights[3], 0.0);
  EXPECT_NEAR(sum(base.weights), 1.0, 1e-12);
}

TEST(NormalizeLogWeights, AllMinusInfinityIsDegenerate) {
  EXPECT_THROW(normalize_log_weights(std::vector<double>{-kInf, -kInf}), DegenerateCloudError);
  EXPECT_THROW(normalize_log_weights(std::vector<double>{}), std::invalid_argument);
}

TEST(Ess, KnownValues) {
  EXPECT_NEAR(ess(std::vector<double>(100, 0.01)), 100.0, 1e-9);
  EXPECT_DOUBLE_EQ(ess(std::vector<double>{0, 1, 0}), 1.0);
  EXPECT_NEAR(ess(std::vector<double>{0.5, 0.25, 0.25}), 1.0 / 0.375, 1e-12);
}

TEST(Cess, ZeroStepIsM) {
  std::vector<double> w{0.1, 0.2, 0.7};
  std::vector<double> la{-3.0, 5.0, 0.5};
  EXPECT_DOUBLE_EQ(cess(w, la, 0.0), 3.0);
}

TEST(Cess, ConstantAlphaIsM) {
  std::vector<double> w{0.1, 0.2, 0.7};
  std::vector<double> la(3, 12.3);
  for (double d : {0.1, 0.5, 1.0}) EXPECT_NEAR(cess(w, la, d), 3.0, 1e-12);
}

TEST(Cess, TwoParticleClosedForm) {
  std::vector<double> w{0.5, 0.5};
  std::vector<double> la{0.0, 1.0};
  const double e = std::exp(1.0);
  const double expected = 2.0 * std::pow((1 + e) / 2, 2) / ((1 + e * e) / 2);
  EXPECT_NEAR(cess(w, la, 1.0), expected, 1e-12);
  EXPECT_NEAR(expected, 1.648, 1e-3);
}

TEST(Cess, BoundedByM) {
  std::vector<double> w{0.05, 0.15, 0.3, 0.5};
  std::vector<double> la{-400.0, 3.0, 800.0, -kInf};
  for (double d = 0.0; d <= 1.0; d += 0.05) {
    const double c = cess(w, la, d);
    EXPECT_LE(c, 4.0 + 1e-12);
    EXPECT_GT(c, 0.0);
  }
}

TEST(NextRho, ConstantAlphaJumpsToOne) {
  SamplerConfig cfg;
  std::vector<double> w(4, 0.25), la(4, -2.0);
  const auto step = next_rho(w, la, 0.0, cfg);
  EXPECT_EQ(step.rho, 1.0);
  EXPECT_FALSE(step.slow_progress);
}

TEST(NextRho, CapsAtOneWhenThresholdMet) {
  SamplerConfig cfg;
  std::vector<double> w{0.5, 0.5}, la{0.0, 0.01};
  EXPECT_EQ(next_rho(w, la, 0.3, cfg).rho, 1.0);
}

TEST(NextRho, TwoParticleBisection) {
  SamplerConfig cfg;
  cfg.tau1 = 0.9;
  std::vector<double> w{0.5, 0.5}, la{0.0, 1.0};
  const auto step = next_rho(w, la, 0.0, cfg);
  ASSERT_LT(step.rho, 1.0);
  // Independent scalar oracle: plain bisection on the closed form.
  auto f = [](double d) {
    const double a = 0.5 + 0.5 * std::exp(d);
    return 2.0 * a * a / (0.5 + 0.5 * std::exp(2 * d)) - 1.8;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(step.rho, lo, 1e-9);
  EXPECT_GE(cess(w, la, step.rho), 1.8 - 1e-8);
}

TEST(NextRho, ThresholdHonouredAcrossPriorTemperatures) {
  SamplerConfig cfg;
  cfg.tau1 = 0.5;
  Rng rng(9);
  std::vector<double> w(50), la(50);
  for (auto& v : la) v = 30.0 * std_normal(rng);
  for (auto& v : w) v = uniform01(rng);
  const double s = sum(w);
  for (auto& v : w) v /= s;
  for (double prev : {0.0, 0.2, 0.9}) {
    const auto step = next_rho(w, la, prev, cfg);
    EXPECT_GT(step.rho, prev);
    if (step.rho < 1.0 && !step.slow_progress)
      EXPECT_GE(cess(w, la, step.rho - prev), 25.0 - 1e-6);
  }
}

TEST(NextRho, StallGivesMinimumIncrementAndFlag) {
  SamplerConfig cfg;
  cfg.tau1 = 1.0;
  std::vector<double> w{0.5, 0.5}, la{0.0, 1e12};
  const auto step = next_rho(w, la, 0.25, cfg);
  EXPECT_TRUE(step.slow_progress);
  EXPECT_NEAR(step.rho, 0.25 + cfg.rho_tolerance, 1e-15);
}

TEST(Reweight, ZeroIncrementIsNoop) {
  ParticleCloud<int> c{{1, 2}, {0.3, -0.2}, {}, {0.0, 1.0}};
  c.renormalize();
  const auto before = c.norm_weights;
  reweight(c, 0.0);
  EXPECT_EQ(c.norm_weights, before);
}

TEST(Reweight, UniformHalfStep) {
  ParticleCloud<int> c{{1, 2}, {0.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
  reweight(c, 0.5);
  EXPECT_NEAR(c.norm_weights[0], 0.3775, 1e-4);
  EXPECT_NEAR(c.norm_weights[1], 0.6225, 1e-4);
}

TEST(Reweight, SingleParticle) {
  ParticleCloud<int> c{{1}, {0.0}, {1.0}, {42.0}};
  reweight(c, 0.7);
  EXPECT_EQ(c.norm_weights[0], 1.0);
}

TEST(Reweight, MinusInfinityAlphaKillsParticle) {
  ParticleCloud<int> c{{1, 2}, {0.0, 0.0}, {0.5, 0.5}, {-kInf, 0.0}};
  reweight(c, 0.1);
  EXPECT_EQ(c.norm_weights[0], 0.0);
  EXPECT_EQ(c.norm_weights[1], 1.0);
}

TEST(Resample, OneHotCopies) {
  ParticleCloud<int> c{{7, 8, 9}, {-kInf, 0.0, -kInf}, {0.0, 1.0, 0.0}, {1, 2, 3}};
  Rng rng(1);
  resample_multinomial(c, rng);
  for (int p : c.particles) EXPECT_EQ(p, 8);
  for (double la : c.log_alpha) EXPECT_EQ(la, 2.0);
  for (double w : c.norm_weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
  for (double w : c.log_weights) EXPECT_EQ(w, 0.0);
}

TEST(Resample, BinomialCounts) {
  std::vector<double> w{0.7, 0.3};
  Rng rng(2024);
  const auto anc = multinomial_ancestors(w, 10000, rng);
  const auto zeros = std::count(anc.begin(), anc.end(), 0u);
  const double sd = std::sqrt(10000 * 0.7 * 0.3);
  EXPECT_LT(std::abs(zeros - 7000.0), 4 * sd);
}

TEST(Resample, PreservesExpectations) {
  std::vector<double> w{0.1, 0.4, 0.2, 0.3};
  std::vector<double> f{1.0, -2.0, 5.0, 0.5};
  double target = 0.0, second = 0.0;
  for (int i = 0; i < 4; ++i) {
    target += w[i] * f[i];
    second += w[i] * f[i] * f[i];
  }
  const double var = second - target * target;
  const std::size_t M = 50;
  double total = 0.0;
  Rng rng(3);
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    const auto anc = multinomial_ancestors(w, M, rng);
    double mean = 0.0;
    for (auto a : anc) mean += f[a];
    total += mean / M;
  }
  const double se = std::sqrt(var / M / reps);
  EXPECT_LT(std::abs(total / reps - target), 4 * se);
}

TEST(Evidence, ConstantAlphaTelescopes) {
  TemperingTrace t;
  const double c = -3.7;
  t.rho = {0.0, 0.4, 1.0};
  t.u = {c, c, c};
  t.step_log_ratio = {0.4 * c, 0.6 * c};
  t.cess = {2, 2};
  t.ess = {2, 2};
  t.resampled = {false, false};
  t.slow_progress = {false, false};
  EXPECT_NEAR(evidence_product(t), c, 1e-15);
  EXPECT_NEAR(evidence_path(t), c, 1e-15);
}

TEST(Evidence, TrapezoidHandCase) {
  TemperingTrace t;
  t.rho = {0.0, 0.5, 1.0};
  t.u = {1.0, 2.0, 4.0};
  t.step_log_ratio = {0.0, 0.0};
  t.cess = t.ess = {1, 1};
  t.resampled = t.slow_progress = {false, false};
  EXPECT_DOUBLE_EQ(evidence_path(t), 0.25 * 3.0 + 0.25 * 6.0);
}

TEST(Evidence, SingleStepAndIncompleteTrace) {
  TemperingTrace t;
  t.rho = {0.0, 1.0};
  t.u = {0.0, 0.0};
  t.step_log_ratio = {-1.25};
  t.cess = t.ess = {1};
  t.resampled = t.slow_progress = {false};
  EXPECT_EQ(evidence_product(t), -1.25);
  t.rho = {0.0, 0.5};
  EXPECT_THROW(evidence_product(t), std::invalid_argument);
  EXPECT_THROW(evidence_path(t), std::invalid_argument);
}

TEST(LogIncrementalRatio, MatchesDirectSum) {
  std::vector<double> w{0.2, 0.8}, la{0.0, 2.0};
  EXPECT_NEAR(log_incremental_ratio(w, la, 0.5), std::log(0.2 + 0.8 * std::exp(1.0)), 1e-14);
}
