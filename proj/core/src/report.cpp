#include "sbs/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sbs/data_io.hpp"

namespace sbs {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json flags(const std::vector<bool>& v) {
  Json out = Json::array();
  for (bool b : v) out.push_back(b);
  return out;
}

}  // namespace

const char* version_string() { return SBS_VERSION_STRING; }

Json to_json(const smc::SamplerConfig& c) {
  return Json{{"particles", c.particles},
              {"tau1", c.tau1},
              {"tau2", c.tau2},
              {"sweeps", c.sweeps},
              {"seed", c.master_seed},
              {"path", std::string(smc::to_string(c.path))},
              {"bisection_iters", c.bisection_iters},
              {"rho_tolerance", c.rho_tolerance},
              {"max_steps", c.max_steps}};
}

smc::SamplerConfig sampler_config_from_json(const Json& j, smc::SamplerConfig c) {
  if (!j.is_object()) throw std::invalid_argument("sampler config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "particles") c.particles = value.get<std::size_t>();
    else if (key == "tau1") c.tau1 = value.get<double>();
    else if (key == "tau2") c.tau2 = value.get<double>();
    else if (key == "sweeps") c.sweeps = value.get<int>();
    else if (key == "seed") c.master_seed = value.get<std::uint64_t>();
    else if (key == "path") c.path = smc::parse_path_variant(value.get<std::string>());
    else if (key == "bisection_iters") c.bisection_iters = value.get<int>();
    else if (key == "rho_tolerance") c.rho_tolerance = value.get<double>();
    else if (key == "max_steps") c.max_steps = value.get<std::uint64_t>();
    else throw std::invalid_argument("unknown sampler config key: " + key);
  }
  c.validate();
  return c;
}

Json to_json(const smc::TemperingTrace& t) {
  Json out{{"steps", t.steps()},
           {"rho", numbers(t.rho)},
           {"cess", numbers(t.cess)},
           {"ess", numbers(t.ess)},
           {"resampled", flags(t.resampled)},
           {"step_log_ratio", numbers(t.step_log_ratio)},
           {"u", numbers(t.u)},
           {"slow_progress", flags(t.slow_progress)},
           {"initial_ess", number(t.initial_ess)},
           {"initial_log_norm", number(t.initial_log_norm)},
           {"complete", t.complete()}};
  if (t.complete()) {
    out["log_evidence_product"] = number(smc::evidence_product(t));
    out["log_evidence_path"] = number(smc::evidence_path(t));
  }
  return out;
}

Json to_json(const calibration::CalibrationReport& r) {
  Json phis = Json::array();
  for (std::size_t f = 0; f < r.phi_names.size(); ++f) {
    Json entry{{"name", r.phi_names[f]},
               {"ks_statistic", number(r.ks[f].statistic)},
               {"p_value", number(r.ks[f].p_value)},
               {"u", numbers(r.u[f])}};
    if (!r.coverage.empty()) entry["coverage"] = number(r.coverage[f]);
    phis.push_back(std::move(entry));
  }
  Json failures = Json::array();
  for (std::size_t i = 0; i < r.failed.size(); ++i)
    failures.push_back(Json{{"replicate", r.failed[i]}, {"message", r.failure_messages[i]}});
  return Json{{"method", r.method},
              {"replicates", r.requested},
              {"succeeded", r.requested - r.failed.size()},
              {"ks_reference", r.lattice_size ? "lattice" : "continuous"},
              {"lattice_size", r.lattice_size ? Json(*r.lattice_size) : Json(nullptr)},
              {"functionals", std::move(phis)},
              {"failures", std::move(failures)},
              {"replicate_seeds", r.replicate_seeds}};
}

Json to_json(const calibration::BmaSummary& s) {
  Json models = Json::array();
  for (std::size_t i = 0; i < s.groups.size(); ++i) {
    Json m{{"g", s.groups[i]}, {"posterior_probability", number(s.model_posterior[i])}};
    if (i < s.log_evidence.size()) m["log_evidence_product"] = number(s.log_evidence[i]);
    if (i < s.log_evidence_path.size()) m["log_evidence_path"] = number(s.log_evidence_path[i]);
    models.push_back(std::move(m));
  }
  Json params = Json::array();
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    const auto& m = s.moments[i];
    params.push_back(Json{{"name", s.names[i]},
                          {"post_mean", number(m.mean)},
                          {"within_var", number(m.within_var)},
                          {"between_var", number(m.between_var)},
                          {"sd", number(m.sd)},
                          {"ratio", number(m.ratio)}});
  }
  double p1 = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.groups.size(); ++i) {
    if (s.groups[i] == 1) p1 = s.model_posterior[i];
  }
  return Json{{"p_g1", number(p1)}, {"models", std::move(models)}, {"parameters", std::move(params)}};
}

void write_u_csv(const std::filesystem::path& path,
                 const std::vector<calibration::CalibrationReport>& reports) {
  std::string text = "replicate,method,phi,u\n";
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.phi_names.size(); ++f) {
      std::size_t pos = 0;
      for (std::size_t s = 0; s < r.requested; ++s) {
        if (std::find(r.failed.begin(), r.failed.end(), s) != r.failed.end()) continue;
        text += std::to_string(s) + "," + r.method + "," + r.phi_names[f] + "," +
                format_double(r.u[f][pos++]) + "\n";
      }
    }
  }
  write_text_file(path, text);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sbs
