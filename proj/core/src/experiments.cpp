#include "sbs/calibration/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "sbs/approx/logistic_fit.hpp"
#include "sbs/calibration/ustat.hpp"
#include "sbs/math.hpp"
#include "sbs/models/conjugate.hpp"
#include "sbs/models/lca.hpp"
#include "sbs/models/logistic.hpp"

namespace sbs::calibration {

namespace {

// Seed slots inside one replicate.
enum : std::uint64_t { kSimSlot = 0, kFitSlot = 1, kDrawSlot = 2, kRunSlot = 3 };

smc::SamplerConfig replicate_sampler(const smc::SamplerConfig& base, std::uint64_t seed) {
  smc::SamplerConfig c = base;
  c.master_seed = seed;
  c.threads = 1;  // parallelism is across replicates
  return c;
}

template <class State, class Phi>
std::vector<double> phi_values(const std::vector<State>& states, Phi&& phi) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(phi(s));
  return out;
}

std::vector<std::string> indexed_names(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int j = 1; j <= count; ++j) out.push_back(stem + std::to_string(j));
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

WeightedMoments weighted_moments(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size())
    throw std::invalid_argument("weighted_moments: empty or unequal inputs");
  WeightedMoments m;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    m.mean += weights[i] * values[i];
    total += weights[i];
  }
  m.mean /= total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    m.var += weights[i] * d * d;
  }
  m.var /= total;
  return m;
}

std::vector<CalibrationReport> calibrate_lca(const LcaCalibrationConfig& cfg) {
  if (cfg.design.g < 2) throw std::invalid_argument("calibrate_lca: needs g >= 2");
  if (cfg.approx_draws == 0) throw std::invalid_argument("calibrate_lca: approx_draws must be >= 1");
  const std::vector<std::string> methods{"VB", "VB.Sym", "SBS-from-VB", "SBS-from-VB.Sym"};
  const std::vector<std::string> phis{"abs_pi_diff", "pi1"};
  using models::LcaState;
  const auto phi_fns = std::array{+[](const LcaState& s) { return models::phi_pi_gap(s); },
                                  +[](const LcaState& s) { return models::phi_pi1(s); }};

  auto replicate = [&](std::size_t, std::uint64_t seed) {
    Rng sim = make_stream(seed, StreamTag::kSimulate, 0, 0);
    auto pp = models::simulate_prior_predictive(cfg.design, sim);
    auto y = std::make_shared<const Eigen::MatrixXd>(std::move(pp.data));

    approx::LcaVbOptions vb_opt = cfg.vb;
    vb_opt.seed = derive_seed(seed, kFitSlot);
    const auto vb = approx::fit_vb_lca(*y, cfg.design.g, cfg.design.hyper, vb_opt);
    const auto sym = approx::symmetrize(vb);

    ReplicateOutcome out;
    Rng draw = make_stream(seed, StreamTag::kAux, 0, 0);
    std::vector<LcaState> plain(cfg.approx_draws), mixed(cfg.approx_draws);
    for (auto& s : plain) s = vb.sample(draw);
    for (auto& s : mixed) s = sym.sample(draw);
    for (const auto* draws : {&plain, &mixed}) {
      std::vector<double> u;
      for (auto phi : phi_fns) u.push_back(u_statistic(phi(pp.theta), phi_values(*draws, phi)));
      out.u.push_back(std::move(u));
    }
    for (int k = 0; k < 2; ++k) {
      const models::LcaTarget target(y, cfg.design.hyper, vb, k == 1);
      const auto run = smc::run_sbs(
          target, replicate_sampler(cfg.sampler, derive_seed(seed, kRunSlot + k)));
      const auto& cloud = run.final_cloud;
      std::vector<double> u;
      for (auto phi : phi_fns)
        u.push_back(u_statistic(phi(pp.theta), phi_values(cloud.particles, phi), cloud.norm_weights));
      out.u.push_back(std::move(u));
    }
    return out;
  };
  return run_checking_procedure(methods, phis, cfg.replicates, cfg.seed, cfg.threads, replicate,
                                cfg.lattice_size);
}

std::vector<CalibrationReport> calibrate_sbmreg(const SbmRegCalibrationConfig& cfg) {
  if (cfg.true_groups.empty() || cfg.g_max < 1 || cfg.g_max > 6)
    throw std::invalid_argument("calibrate_sbmreg: bad group settings");
  for (int g : cfg.true_groups)
    if (g < 1 || g > 6) throw std::invalid_argument("calibrate_sbmreg: true g outside 1..6");
  if (cfg.p < 1 || cfg.approx_draws == 0)
    throw std::invalid_argument("calibrate_sbmreg: needs p >= 1 and approx_draws >= 1");
  const std::vector<std::string> methods{"VB", "SBS"};
  const auto phis = indexed_names("beta", cfg.p);

  auto replicate = [&](std::size_t s, std::uint64_t seed) {
    models::SbmRegDesign design;
    design.n = cfg.n;
    design.p = cfg.p;
    design.g = cfg.true_groups[s % cfg.true_groups.size()];
    design.priors = cfg.priors;
    Rng sim = make_stream(seed, StreamTag::kSimulate, 0, 0);
    auto pp = models::simulate_prior_predictive(design, sim);
    auto data = std::make_shared<const models::EdgeData>(std::move(pp.data));

    const auto G = static_cast<std::size_t>(cfg.g_max);
    std::vector<double> elbo(G), evidence(G);
    std::vector<approx::SbmRegVbApprox> fits(G);
    std::vector<smc::ParticleCloud<models::SbmRegState>> clouds(G);
    for (int g = 1; g <= cfg.g_max; ++g) {
      approx::SbmRegVbOptions vb_opt = cfg.vb;
      vb_opt.seed = derive_seed(derive_seed(seed, kFitSlot), g);
      fits[g - 1] = approx::fit_vb_sbmreg(*data, g, cfg.priors, vb_opt);
      elbo[g - 1] = fits[g - 1].elbo;
      const models::SbmRegTarget target(data, cfg.priors, fits[g - 1], cfg.symmetrized);
      auto run = smc::run_sbs(
          target, replicate_sampler(cfg.sampler, derive_seed(derive_seed(seed, kRunSlot), g)));
      evidence[g - 1] = run.log_evidence_product;
      clouds[g - 1] = std::move(run.final_cloud);
    }
    const auto p_vb = model_posterior(elbo);
    const auto p_sbs = model_posterior(evidence);

    ReplicateOutcome out;
    out.u.assign(2, {});
    out.covered.assign(2, {});
    Rng draw = make_stream(seed, StreamTag::kAux, 0, 0);
    std::vector<Eigen::VectorXd> vb_draws;
    std::vector<double> vb_w;
    for (std::size_t g = 0; g < G; ++g) {
      const auto beta = fits[g].beta_gauss();
      for (std::size_t m = 0; m < cfg.approx_draws; ++m) {
        vb_draws.push_back(beta.sample(draw));
        vb_w.push_back(p_vb[g] / static_cast<double>(cfg.approx_draws));
      }
    }
    for (int j = 0; j < cfg.p; ++j) {
      const double star = pp.theta.beta(j);
      CoverageCase vb_case{star, {}, vb_w};
      for (const auto& b : vb_draws) vb_case.values.push_back(b(j));
      CoverageCase sbs_case{star, {}, {}};
      for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t m = 0; m < clouds[g].particles.size(); ++m) {
          sbs_case.values.push_back(clouds[g].particles[m].beta(j));
          sbs_case.weights.push_back(p_sbs[g] * clouds[g].norm_weights[m]);
        }
      }
      int k = 0;
      for (const auto* c : {&vb_case, &sbs_case}) {
        out.u[k].push_back(u_statistic(star, c->values, c->weights));
        out.covered[k].push_back(interval_contains(*c, cfg.level) ? 1 : 0);
        ++k;
      }
    }
    return out;
  };
  return run_checking_procedure(methods, phis, cfg.replicates, cfg.seed, cfg.threads, replicate);
}

std::vector<CalibrationReport> calibrate_logistic(const LogisticCalibrationConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1 || cfg.approx_draws == 0)
    throw std::invalid_argument("calibrate_logistic: needs n, p, approx_draws >= 1");
  const std::vector<std::string> methods{"VB", "SBS-from-VB"};
  const auto phis = indexed_names("theta", cfg.p);

  auto replicate = [&](std::size_t, std::uint64_t seed) {
    Rng sim = make_stream(seed, StreamTag::kSimulate, 0, 0);
    models::LogisticDesign design{models::gaussian_design(cfg.n, cfg.p, sim), cfg.prior_var};
    auto pp = models::simulate_prior_predictive(design, sim);
    auto data = std::make_shared<const models::LogisticData>(std::move(pp.data));
    const auto vb = approx::fit_vb_logistic(data->x, data->y, cfg.prior_var);
    const auto ml = approx::fit_ml_logistic(data->x, data->y, cfg.prior_var);

    ReplicateOutcome out;
    Rng draw = make_stream(seed, StreamTag::kAux, 0, 0);
    std::vector<Eigen::VectorXd> vb_draws(cfg.approx_draws);
    for (auto& d : vb_draws) d = vb.sample(draw);
    const models::LogisticTarget target(data, cfg.prior_var, vb, ml.covariance());
    const auto run =
        smc::run_sbs(target, replicate_sampler(cfg.sampler, derive_seed(seed, kRunSlot)));
    const auto& cloud = run.final_cloud;
    out.u.assign(2, {});
    for (int j = 0; j < cfg.p; ++j) {
      auto coord = [j](const Eigen::VectorXd& t) { return t(j); };
      out.u[0].push_back(u_statistic(pp.theta(j), phi_values(vb_draws, coord)));
      out.u[1].push_back(
          u_statistic(pp.theta(j), phi_values(cloud.particles, coord), cloud.norm_weights));
    }
    return out;
  };
  return run_checking_procedure(methods, phis, cfg.replicates, cfg.seed, cfg.threads, replicate);
}

std::vector<CalibrationReport> calibrate_gaussian_mean(const GaussianCalibrationConfig& cfg) {
  if (cfg.n < 0 || !(cfg.noise_var > 0.0) || !(cfg.prior_var > 0.0))
    throw std::invalid_argument("calibrate_gaussian_mean: bad model settings");
  const std::vector<std::string> methods{"exact", "SBS"};
  const std::vector<std::string> phis{"theta"};

  auto replicate = [&](std::size_t, std::uint64_t seed) {
    Rng sim = make_stream(seed, StreamTag::kSimulate, 0, 0);
    const double theta = cfg.prior_mean + std::sqrt(cfg.prior_var) * std_normal(sim);
    std::vector<double> y(static_cast<std::size_t>(cfg.n));
    for (auto& v : y) v = theta + std::sqrt(cfg.noise_var) * std_normal(sim);
    const auto exact = models::GaussianMeanTarget::from_posterior(y, cfg.noise_var,
                                                                  cfg.prior_mean, cfg.prior_var);
    const double m = exact.posterior_mean();
    const double v = exact.posterior_var();
    const models::GaussianMeanTarget target(y, cfg.noise_var, cfg.prior_mean, cfg.prior_var,
                                            m + std::sqrt(v), 2.0 * v);
    const auto run =
        smc::run_sbs(target, replicate_sampler(cfg.sampler, derive_seed(seed, kRunSlot)));
    ReplicateOutcome out;
    out.u.push_back({normal_cdf((theta - m) / std::sqrt(v))});
    out.u.push_back({u_statistic(theta, run.final_cloud.particles, run.final_cloud.norm_weights)});
    return out;
  };
  return run_checking_procedure(methods, phis, cfg.replicates, cfg.seed, cfg.threads, replicate);
}

BmaSummary summarize_runs(const std::vector<GroupRun>& runs,
                          const std::vector<std::string>& beta_names) {
  BmaSummary s;
  if (runs.empty()) return s;
  for (const auto& r : runs) {
    s.groups.push_back(r.g);
    s.log_evidence.push_back(r.output.log_evidence_product);
    s.log_evidence_path.push_back(r.output.log_evidence_path);
  }
  s.model_posterior = model_posterior(s.log_evidence);
  s.names = beta_names;
  for (std::size_t j = 0; j < beta_names.size(); ++j) {
    std::vector<double> means, vars;
    for (const auto& r : runs) {
      const auto& cloud = r.output.final_cloud;
      std::vector<double> values;
      for (const auto& p : cloud.particles) values.push_back(p.beta(static_cast<Eigen::Index>(j)));
      const auto m = weighted_moments(values, cloud.norm_weights);
      means.push_back(m.mean);
      vars.push_back(m.var);
    }
    s.moments.push_back(bma_moments(means, vars, s.model_posterior));
  }
  return s;
}

ModelSelectResult model_select_sbmreg(std::shared_ptr<const models::EdgeData> data,
                                      const ModelSelectConfig& cfg) {
  if (!data) throw std::invalid_argument("model_select_sbmreg: no data");
  if (cfg.groups.empty()) throw std::invalid_argument("model_select_sbmreg: empty g range");
  for (int g : cfg.groups)
    if (g < 1 || g > 6) throw std::invalid_argument("model_select_sbmreg: g outside 1..6");
  ModelSelectResult result;
  for (int g : cfg.groups) {
    try {
      approx::SbmRegVbOptions vb_opt = cfg.vb;
      vb_opt.seed = derive_seed(cfg.vb.seed, static_cast<std::uint64_t>(g));
      GroupRun run;
      run.g = g;
      run.vb = approx::fit_vb_sbmreg(*data, g, cfg.priors, vb_opt);
      const models::SbmRegTarget target(data, cfg.priors, run.vb, cfg.symmetrized);
      smc::SamplerConfig sc = cfg.sampler;
      sc.master_seed = derive_seed(cfg.sampler.master_seed, static_cast<std::uint64_t>(g));
      run.output = smc::run_sbs(target, sc);
      result.runs.push_back(std::move(run));
    } catch (const std::exception& e) {
      result.failed_g = g;
      result.error = e.what();
      break;
    }
  }
  result.summary = summarize_runs(result.runs, data->names);
  return result;
}

}  // namespace sbs::calibration
