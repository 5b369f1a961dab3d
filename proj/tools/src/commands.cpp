#include "commands.hpp"

#include <chrono>
#include <iostream>
#include <limits>
#include <memory>
#include <type_traits>

#include "sbs/approx/logistic_fit.hpp"
#include "sbs/approx/serialize.hpp"
#include "sbs/calibration/experiments.hpp"
#include "sbs/data_io.hpp"
#include "sbs/models/lca.hpp"
#include "sbs/models/logistic.hpp"
#include "sbs/models/sbmreg.hpp"
#include "sbs/smc/sampler.hpp"

namespace sbs::cli {

namespace fs = std::filesystem;

namespace {

// CBS_IS starts below this fraction of M are flagged.
constexpr double kLowInitialEss = 0.05;

void log_line(const std::string& msg) { std::cerr << "[sbs] " << msg << '\n'; }

Json header(const char* command, const ExperimentConfig& c) {
  return Json{{"command", command}, {"version", version_string()}, {"config", to_json(c)}};
}

void write_json(const ExperimentConfig& c, const char* name, const Json& j) {
  const auto path = c.output_dir / name;
  write_text_file(path, dump_json(j));
  log_line("wrote " + path.generic_string());
}

std::string number_name(const char* stem, std::initializer_list<int> idx) {
  std::string s = stem;
  for (int i : idx) s += "_" + std::to_string(i);
  return s;
}

void require_data(const ExperimentConfig& c) {
  if (c.data.empty()) throw ConfigError("no data file given (--data or data_path)");
}

// ---- logistic

struct LogisticSetup {
  std::shared_ptr<const models::LogisticData> data;
  approx::GaussianApprox approx;
  Eigen::MatrixXd proposal_cov;
};

approx::GaussianApprox fit_logistic_approx(const models::LogisticData& d, const ExperimentConfig& c) {
  auto base = c.approx.kind == "ml"
                  ? approx::fit_ml_logistic(d.x, d.y, std::numeric_limits<double>::infinity())
                  : approx::fit_vb_logistic(d.x, d.y, c.prior_var);
  return approx::perturb_approx(base, c.approx.perturbation);
}

LogisticSetup logistic_setup(const ExperimentConfig& c) {
  require_data(c);
  LogisticSetup s;
  auto data = std::make_shared<models::LogisticData>(read_logistic_csv(c.data));
  if (!c.approx.file.empty()) {
    s.approx = approx::gaussian_from_json(approx::read_json_file(c.approx.file));
    if (s.approx.dim() != data->p()) throw ConfigError("approximation dimension does not match the data");
  } else {
    s.approx = fit_logistic_approx(*data, c);
  }
  // Random-walk scale from the posterior mode; VB covariance if the mode diverges.
  try {
    s.proposal_cov = approx::fit_ml_logistic(data->x, data->y, c.prior_var).covariance();
  } catch (const std::exception& e) {
    log_line(std::string("mode fit failed (") + e.what() + "); using the approximation covariance");
    s.proposal_cov = s.approx.covariance();
  }
  s.data = std::move(data);
  return s;
}

// ---- lca / sbmreg fits

std::shared_ptr<const Eigen::MatrixXd> load_lca(const ExperimentConfig& c) {
  require_data(c);
  return std::make_shared<const Eigen::MatrixXd>(read_lca_csv(c.data));
}

approx::LcaVbApprox lca_approx(const Eigen::MatrixXd& y, const ExperimentConfig& c) {
  if (!c.approx.file.empty()) return approx::lca_vb_from_json(approx::read_json_file(c.approx.file));
  approx::LcaVbOptions o;
  o.seed = derive_seed(c.seed, 1);
  return approx::fit_vb_lca(y, c.g, c.hyper, o);
}

std::shared_ptr<const models::EdgeData> load_network(const ExperimentConfig& c) {
  require_data(c);
  return std::make_shared<const models::EdgeData>(read_edge_csv(c.data));
}

approx::SbmRegVbApprox sbmreg_approx(const models::EdgeData& d, const ExperimentConfig& c) {
  if (!c.approx.file.empty())
    return approx::sbmreg_vb_from_json(approx::read_json_file(c.approx.file));
  approx::SbmRegVbOptions o;
  o.seed = derive_seed(c.seed, 1);
  return approx::fit_vb_sbmreg(d, c.g, c.priors, o);
}

// ---- sample output

template <class State, class Flatten>
void write_samples(const ExperimentConfig& c, const std::vector<std::string>& names,
                   const smc::ParticleCloud<State>& cloud, Flatten flatten) {
  std::vector<std::vector<double>> rows;
  rows.reserve(cloud.size());
  for (const auto& s : cloud.particles) rows.push_back(flatten(s));
  const auto path = c.output_dir / "samples.csv";
  write_sample_csv(path, names, cloud.norm_weights, rows);
  log_line("wrote " + path.generic_string());
}

std::vector<std::string> lca_names(int g, Eigen::Index q) {
  std::vector<std::string> names;
  for (int k = 1; k <= g; ++k) names.push_back(number_name("pi", {k}));
  for (int k = 1; k <= g; ++k)
    for (Eigen::Index j = 1; j <= q; ++j) names.push_back(number_name("gamma", {k, static_cast<int>(j)}));
  return names;
}

std::vector<double> lca_row(const models::LcaState& s) {
  std::vector<double> r(s.pi.data(), s.pi.data() + s.pi.size());
  for (Eigen::Index k = 0; k < s.gamma.rows(); ++k)
    for (Eigen::Index j = 0; j < s.gamma.cols(); ++j) r.push_back(s.gamma(k, j));
  return r;
}

std::vector<std::string> sbmreg_names(int g, const std::vector<std::string>& covariates) {
  std::vector<std::string> names;
  for (int k = 1; k <= g; ++k)
    for (int l = k; l <= g; ++l) names.push_back(number_name("alpha", {k, l}));
  for (const auto& n : covariates) names.push_back("beta_" + n);
  for (int k = 1; k <= g; ++k) names.push_back(number_name("pi", {k}));
  return names;
}

std::vector<double> sbmreg_row(const models::SbmRegState& s) {
  std::vector<double> r;
  const auto g = s.alpha.rows();
  for (Eigen::Index k = 0; k < g; ++k)
    for (Eigen::Index l = k; l < g; ++l) r.push_back(s.alpha(k, l));
  for (Eigen::Index c = 0; c < s.beta.size(); ++c) r.push_back(s.beta(c));
  for (Eigen::Index k = 0; k < g; ++k) r.push_back(s.pi(k));
  return r;
}

// `start` is a GaussianApprox pointer for CBS_IS runs, nullptr otherwise.
template <class Target, class Start, class Flatten>
int run_and_write(const ExperimentConfig& c, const Target& target, Start start,
                  const std::vector<std::string>& names, Flatten flatten) {
  constexpr bool kHasStart = !std::is_same_v<Start, std::nullptr_t>;
  Json report = header("sample", c);
  const auto t0 = std::chrono::steady_clock::now();
  auto write_timing = [&] {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(c, "timing.json", Json{{"wall_time_seconds", secs}, {"threads", c.threads}});
  };
  try {
    const auto out = [&] {
      if constexpr (kHasStart) {
        if (start) return smc::run_sbs(target, c.sampler, *start);
      }
      return smc::run_sbs(target, c.sampler);
    }();
    report["trace"] = sbs::to_json(out.trace);
    report["log_evidence_product"] = out.log_evidence_product;
    report["log_evidence_path"] = out.log_evidence_path;
    Json warnings = Json::array();
    bool used_start = false;
    if constexpr (kHasStart) used_start = start != nullptr;
    if (used_start) {
      const double frac = out.trace.initial_ess / static_cast<double>(c.sampler.particles);
      report["initial_ess_fraction"] = frac;
      if (frac < kLowInitialEss) {
        const std::string msg = "low initial ESS for CBS_IS (" + std::to_string(frac) +
                                " of M): the start approximation is a poor importance proposal";
        warnings.push_back(msg);
        log_line("WARNING: " + msg);
      }
    }
    report["warnings"] = warnings;
    write_samples(c, names, out.final_cloud, flatten);
    write_json(c, "report.json", report);
    write_timing();
    log_line("steps " + std::to_string(out.trace.steps()) + ", log evidence " +
             format_double(out.log_evidence_product));
    return kOk;
  } catch (const smc::DegenerateCloudError& e) {
    report["error"] = e.what();
    report["trace"] = sbs::to_json(e.partial_trace());
    write_json(c, "report.json", report);
    write_timing();
    log_line(std::string("sampler degenerated: ") + e.what());
    return kDegenerate;
  }
}

// ---- calibration configs

template <class F>
void each_key(const Json& j, F&& f) {
  for (const auto& [key, value] : j.items())
    if (!f(key, value)) throw ConfigError("unknown calibration key: " + key);
}

std::optional<int> lattice(const Json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<int>();
}

}  // namespace

int cmd_fit_approx(const ExperimentConfig& c) {
  Json report = header("fit-approx", c);
  Json approx_json;
  switch (c.model) {
    case ModelKind::kLogistic: {
      require_data(c);
      const auto d = read_logistic_csv(c.data);
      const auto a = fit_logistic_approx(d, c);
      approx_json = approx::to_json(a);
      report["names"] = d.names;
      break;
    }
    case ModelKind::kLca: {
      const auto y = load_lca(c);
      const auto a = lca_approx(*y, c);
      approx_json = approx::to_json(a);
      report["elbo"] = a.elbo;
      break;
    }
    case ModelKind::kSbmReg: {
      const auto d = load_network(c);
      const auto a = sbmreg_approx(*d, c);
      approx_json = approx::to_json(a);
      report["elbo"] = a.elbo;
      break;
    }
    case ModelKind::kGaussian:
      throw ConfigError("fit-approx supports logistic, lca and sbmreg");
  }
  write_json(c, "approx.json", approx_json);
  write_json(c, "report.json", report);
  return kOk;
}

int cmd_sample(const ExperimentConfig& c) {
  const auto path = c.sampler.path;
  if (c.model != ModelKind::kLogistic && path != smc::PathVariant::kSbs)
    throw ConfigError("CBS and CBS_IS are available for the logistic model only");
  switch (c.model) {
    case ModelKind::kLogistic: {
      const auto s = logistic_setup(c);
      const auto p = s.data->p();
      const auto reference = path == smc::PathVariant::kSbs
                                 ? s.approx
                                 : approx::GaussianApprox::isotropic(p, c.prior_var);
      const models::LogisticTarget t(s.data, c.prior_var, reference, s.proposal_cov);
      auto flatten = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
      const approx::GaussianApprox* start = path == smc::PathVariant::kCbsIs ? &s.approx : nullptr;
      return run_and_write(c, t, start,
                           s.data->names, flatten);
    }
    case ModelKind::kLca: {
      const auto y = load_lca(c);
      auto a = lca_approx(*y, c);
      const int g = a.group_count();
      const models::LcaTarget t(y, c.hyper, std::move(a), c.approx.symmetrized);
      return run_and_write(c, t, nullptr, lca_names(g, y->cols()), lca_row);
    }
    case ModelKind::kSbmReg: {
      const auto d = load_network(c);
      auto a = sbmreg_approx(*d, c);
      const int g = a.group_count();
      const models::SbmRegTarget t(d, c.priors, std::move(a), c.approx.symmetrized);
      return run_and_write(c, t, nullptr, sbmreg_names(g, d->names), sbmreg_row);
    }
    case ModelKind::kGaussian:
      break;
  }
  throw ConfigError("sample supports logistic, lca and sbmreg");
}

int cmd_model_select(const ExperimentConfig& c) {
  if (c.model != ModelKind::kSbmReg) throw ConfigError("model-select supports the sbmreg model");
  const auto data = load_network(c);
  calibration::ModelSelectConfig ms;
  ms.groups.clear();
  for (int g = c.g_min; g <= c.g_max; ++g) ms.groups.push_back(g);
  ms.priors = c.priors;
  ms.sampler = c.sampler;
  ms.vb.seed = derive_seed(c.seed, 1);
  ms.symmetrized = c.approx.symmetrized;
  const auto res = calibration::model_select_sbmreg(data, ms);

  Json bma = header("model-select", c);
  Json summary = sbs::to_json(res.summary);
  bma["p_g1"] = summary["p_g1"];
  bma["summary"] = summary;
  Json runs = Json::array();
  for (const auto& r : res.runs) {
    runs.push_back(Json{{"g", r.g},
                    {"vb_elbo", r.vb.elbo},
                    {"log_evidence_product", r.output.log_evidence_product},
                    {"log_evidence_path", r.output.log_evidence_path},
                    {"trace", sbs::to_json(r.output.trace)}});
  }
  bma["runs"] = runs;
  if (res.failed_g) {
    bma["error"] = {{"g", *res.failed_g}, {"message", res.error}};
    write_json(c, "bma.json", bma);
    log_line("g = " + std::to_string(*res.failed_g) + " failed: " + res.error +
             "; partial results saved");
    return kDegenerate;
  }
  write_json(c, "bma.json", bma);
  if (!summary["p_g1"].is_null())
    std::cout << "p(g=1|Y) = " << format_double(summary["p_g1"].get<double>()) << '\n';
  std::cout << "parameter  post.mean  within.var  between.var  sd  ratio\n";
  for (std::size_t k = 0; k < res.summary.names.size(); ++k) {
    const auto& m = res.summary.moments[k];
    std::cout << res.summary.names[k] << "  " << format_double(m.mean) << "  "
              << format_double(m.within_var) << "  " << format_double(m.between_var) << "  "
              << format_double(m.sd) << "  " << format_double(m.ratio) << '\n';
  }
  return kOk;
}

int cmd_calibrate(const ExperimentConfig& c) {
  const Json& k = c.calibration;
  std::vector<calibration::CalibrationReport> reports;
  Json report = header("calibrate", c);
  auto emit = [&](const std::vector<calibration::CalibrationReport>& rs) {
    Json arr = Json::array();
    for (const auto& r : rs) arr.push_back(sbs::to_json(r));
    report["reports"] = arr;
    write_json(c, "calibration.json", report);
    const auto path = c.output_dir / "u.csv";
    write_u_csv(path, rs);
    log_line("wrote " + path.generic_string());
  };
  try {
    switch (c.model) {
      case ModelKind::kLca: {
        calibration::LcaCalibrationConfig cfg;
        cfg.design.hyper = c.hyper;
        cfg.design.g = c.g;
        each_key(k, [&](const std::string& key, const Json& v) {
          if (key == "replicates") cfg.replicates = v.get<std::size_t>();
          else if (key == "approx_draws") cfg.approx_draws = v.get<std::size_t>();
          else if (key == "n") cfg.design.n = v.get<int>();
          else if (key == "q") cfg.design.q = v.get<int>();
          else if (key == "lattice_size") cfg.lattice_size = lattice(v);
          else return false;
          return true;
        });
        cfg.sampler = c.sampler;
        cfg.sampler.threads = 1;
        cfg.seed = c.seed;
        cfg.threads = c.threads;
        reports = calibration::calibrate_lca(cfg);
        break;
      }
      case ModelKind::kSbmReg: {
        calibration::SbmRegCalibrationConfig cfg;
        cfg.priors = c.priors;
        cfg.symmetrized = c.approx.symmetrized;
        cfg.g_max = c.g_max;
        each_key(k, [&](const std::string& key, const Json& v) {
          if (key == "replicates") cfg.replicates = v.get<std::size_t>();
          else if (key == "approx_draws") cfg.approx_draws = v.get<std::size_t>();
          else if (key == "n") cfg.n = v.get<int>();
          else if (key == "p") cfg.p = v.get<int>();
          else if (key == "true_groups") cfg.true_groups = v.get<std::vector<int>>();
          else if (key == "level") cfg.level = v.get<double>();
          else return false;
          return true;
        });
        cfg.sampler = c.sampler;
        cfg.sampler.threads = 1;
        cfg.seed = c.seed;
        cfg.threads = c.threads;
        reports = calibration::calibrate_sbmreg(cfg);
        break;
      }
      case ModelKind::kLogistic: {
        calibration::LogisticCalibrationConfig cfg;
        each_key(k, [&](const std::string& key, const Json& v) {
          if (key == "replicates") cfg.replicates = v.get<std::size_t>();
          else if (key == "approx_draws") cfg.approx_draws = v.get<std::size_t>();
          else if (key == "n") cfg.n = v.get<int>();
          else if (key == "p") cfg.p = v.get<int>();
          else if (key == "prior_var") cfg.prior_var = v.get<double>();
          else return false;
          return true;
        });
        cfg.sampler = c.sampler;
        cfg.sampler.threads = 1;
        cfg.seed = c.seed;
        cfg.threads = c.threads;
        reports = calibration::calibrate_logistic(cfg);
        break;
      }
      case ModelKind::kGaussian: {
        calibration::GaussianCalibrationConfig cfg;
        each_key(k, [&](const std::string& key, const Json& v) {
          if (key == "replicates") cfg.replicates = v.get<std::size_t>();
          else if (key == "n") cfg.n = v.get<int>();
          else if (key == "noise_var") cfg.noise_var = v.get<double>();
          else if (key == "prior_mean") cfg.prior_mean = v.get<double>();
          else if (key == "prior_var") cfg.prior_var = v.get<double>();
          else return false;
          return true;
        });
        cfg.sampler = c.sampler;
        cfg.sampler.threads = 1;
        cfg.seed = c.seed;
        cfg.threads = c.threads;
        reports = calibration::calibrate_gaussian_mean(cfg);
        break;
      }
    }
  } catch (const calibration::CalibrationFailure& e) {
    report["error"] = e.what();
    emit(e.reports());
    log_line(std::string("calibration failed: ") + e.what());
    return kCalibration;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("calibration: ") + e.what());
  }
  emit(reports);
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.phi_names.size(); ++f)
      std::cout << r.method << "  " << r.phi_names[f] << "  KS p = " << format_double(r.ks[f].p_value)
                << '\n';
  }
  return kOk;
}

}  // namespace sbs::cli
