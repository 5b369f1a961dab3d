#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "sbs/approx/lca_vb.hpp"
#include "sbs/approx/logistic_fit.hpp"
#include "sbs/models/lca.hpp"
#include "sbs/models/logistic.hpp"
#include "sbs/models/sbmreg.hpp"
#include "sbs/models/simulate.hpp"
#include "sbs/smc/sampler.hpp"

using namespace sbs;

namespace {

std::vector<double> random_log_weights(std::size_t m, std::vector<double>& log_alpha) {
  Rng rng(1);
  std::vector<double> w(m);
  log_alpha.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = uniform01(rng);
    log_alpha[i] = -50.0 * uniform01(rng);
  }
  double s = 0;
  for (double v : w) s += v;
  for (double& v : w) v /= s;
  return w;
}

void BM_NextRho(benchmark::State& state) {
  std::vector<double> la;
  const auto w = random_log_weights(static_cast<std::size_t>(state.range(0)), la);
  smc::SamplerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(smc::next_rho(w, la, 0.0, cfg));
}
BENCHMARK(BM_NextRho)->Arg(1000)->Arg(10000);

void BM_MultinomialResample(benchmark::State& state) {
  std::vector<double> la;
  const auto w = random_log_weights(static_cast<std::size_t>(state.range(0)), la);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(smc::multinomial_ancestors(w, w.size(), rng));
}
BENCHMARK(BM_MultinomialResample)->Arg(1000)->Arg(10000);

struct LcaFixture {
  std::shared_ptr<const Eigen::MatrixXd> y;
  std::unique_ptr<models::LcaTarget> target;
  LcaFixture() {
    auto rng = make_stream(3, StreamTag::kSimulate, 0, 0);
    const auto sim = models::simulate_prior_predictive(models::LcaDesign{}, rng);
    y = std::make_shared<const Eigen::MatrixXd>(sim.data);
    target = std::make_unique<models::LcaTarget>(y, approx::LcaHyper{},
                                                 approx::fit_vb_lca(*y, 2, {}), true);
  }
};

void BM_LcaSweep(benchmark::State& state) {
  static const LcaFixture fx;
  Rng rng(4);
  auto s = fx.target->sample_approx(rng);
  for (auto _ : state) {
    fx.target->move(s, 0.5, rng);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_LcaSweep);

void BM_LcaFitVb(benchmark::State& state) {
  static const LcaFixture fx;
  for (auto _ : state) benchmark::DoNotOptimize(approx::fit_vb_lca(*fx.y, 2, {}));
}
BENCHMARK(BM_LcaFitVb)->Unit(benchmark::kMillisecond);

void BM_SbmRegSweep(benchmark::State& state) {
  models::SbmRegDesign design;
  auto rng = make_stream(5, StreamTag::kSimulate, 0, 0);
  const auto sim = models::simulate_prior_predictive(design, rng);
  const auto data = std::make_shared<const models::EdgeData>(sim.data);
  const models::SbmRegTarget t(data, {}, approx::fit_vb_sbmreg(*data, 2, {}), true);
  auto s = t.sample_approx(rng);
  for (auto _ : state) {
    t.move(s, 0.5, rng);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_SbmRegSweep);

void BM_LogisticSbsRun(benchmark::State& state) {
  auto rng = make_stream(6, StreamTag::kSimulate, 0, 0);
  auto d = std::make_shared<models::LogisticData>();
  d->x = models::gaussian_design(200, 4, rng);
  d->y.resize(200);
  for (int i = 0; i < 200; ++i) d->y(i) = uniform01(rng) < 0.5 ? 1.0 : 0.0;
  const auto vb = approx::fit_vb_logistic(d->x, d->y, 100.0);
  const models::LogisticTarget t(d, 100.0, vb, vb.covariance());
  smc::SamplerConfig cfg;
  cfg.particles = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(smc::run_sbs(t, cfg).log_evidence_product);
}
BENCHMARK(BM_LogisticSbsRun)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
