#include "experiment_config.hpp"

namespace sbs::cli {

namespace {

using Kind = approx::Perturbation::Kind;

std::string perturbation_name(Kind k) {
  switch (k) {
    case Kind::kNone: return "none";
    case Kind::kDiagShrink: return "diag_shrink";
    case Kind::kDiagInflate: return "diag_inflate";
    case Kind::kShift: return "shift";
  }
  return "none";
}

approx::Perturbation perturbation_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "none") throw ConfigError("perturbation needs a factor");
    return {};
  }
  approx::Perturbation p;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const auto name = value.get<std::string>();
      if (name == "none") p.kind = Kind::kNone;
      else if (name == "diag_shrink") p.kind = Kind::kDiagShrink;
      else if (name == "diag_inflate") p.kind = Kind::kDiagInflate;
      else if (name == "shift") p.kind = Kind::kShift;
      else throw ConfigError("unknown perturbation kind: " + name);
    } else if (key == "factor") {
      p.factor = value.get<double>();
    } else if (key == "shift") {
      p.shift = value.get<double>();
    } else {
      throw ConfigError("unknown perturbation key: " + key);
    }
  }
  if (!(p.factor > 0.0)) throw ConfigError("perturbation factor must be positive");
  return p;
}

ApproxSpec approx_from_json(const Json& j, ApproxSpec a) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") a.kind = value.get<std::string>();
    else if (key == "perturbation") a.perturbation = perturbation_from_json(value);
    else if (key == "symmetrized") a.symmetrized = value.get<bool>();
    else if (key == "file") a.file = value.get<std::string>();
    else throw ConfigError("unknown approx key: " + key);
  }
  return a;
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kLca: return "lca";
    case ModelKind::kSbmReg: return "sbmreg";
    case ModelKind::kGaussian: return "gaussian";
  }
  return "logistic";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "logistic") return ModelKind::kLogistic;
  if (text == "lca") return ModelKind::kLca;
  if (text == "sbmreg") return ModelKind::kSbmReg;
  if (text == "gaussian") return ModelKind::kGaussian;
  throw ConfigError("unknown model kind: " + text + " (logistic, lca, sbmreg, gaussian)");
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "model_kind" || key == "model") c.model = parse_model_kind(value.get<std::string>());
      else if (key == "data_path" || key == "data") c.data = value.get<std::string>();
      else if (key == "approx") c.approx = approx_from_json(value, c.approx);
      else if (key == "sampler_config" || key == "sampler")
        c.sampler = sampler_config_from_json(value, c.sampler);
      else if (key == "g") c.g = value.get<int>();
      else if (key == "g_range") {
        if (!value.is_array() || value.size() != 2) throw ConfigError("g_range must be [min, max]");
        c.g_min = value[0].get<int>();
        c.g_max = value[1].get<int>();
      } else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "prior_var") c.prior_var = value.get<double>();
      else if (key == "hyper") {
        for (const auto& [hk, hv] : value.items()) {
          if (hk == "d") c.hyper.d = hv.get<double>();
          else if (hk == "a") c.hyper.a = hv.get<double>();
          else if (hk == "b") c.hyper.b = hv.get<double>();
          else throw ConfigError("unknown hyper key: " + hk);
        }
      } else if (key == "priors") {
        for (const auto& [pk, pv] : value.items()) {
          if (pk == "alpha_var") c.priors.alpha_var = pv.get<double>();
          else if (pk == "beta_var") c.priors.beta_var = pv.get<double>();
          else if (pk == "d") c.priors.d = pv.get<double>();
          else throw ConfigError("unknown priors key: " + pk);
        }
      } else if (key == "calibration") {
        if (!value.is_object()) throw ConfigError("calibration must be an object");
        c.calibration = value;
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json approx{{"kind", c.approx.kind},
              {"symmetrized", c.approx.symmetrized},
              {"perturbation",
               {{"kind", perturbation_name(c.approx.perturbation.kind)},
                {"factor", c.approx.perturbation.factor},
                {"shift", c.approx.perturbation.shift}}}};
  if (!c.approx.file.empty()) approx["file"] = c.approx.file.generic_string();
  return Json{{"model_kind", to_string(c.model)},
              {"data_path", c.data.generic_string()},
              {"approx", approx},
              {"sampler_config", sbs::to_json(c.sampler)},
              {"g", c.g},
              {"g_range", {c.g_min, c.g_max}},
              {"seed", c.seed},
              {"prior_var", c.prior_var},
              {"hyper", {{"d", c.hyper.d}, {"a", c.hyper.a}, {"b", c.hyper.b}}},
              {"priors",
               {{"alpha_var", c.priors.alpha_var},
                {"beta_var", c.priors.beta_var},
                {"d", c.priors.d}}},
              {"calibration", c.calibration}};
}

void finalize(ExperimentConfig& c) {
  if (c.g < 1 || c.g > 6) throw ConfigError("g must lie in 1..6");
  if (c.g_min < 1 || c.g_max > 6 || c.g_min > c.g_max)
    throw ConfigError("g_range must lie within 1..6 with min <= max");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (!(c.prior_var > 0.0)) throw ConfigError("prior_var must be positive");
  if (c.approx.kind != "vb" && c.approx.kind != "ml")
    throw ConfigError("approx kind must be vb or ml");
  c.sampler.master_seed = c.seed;
  c.sampler.threads = c.threads;
  try {
    c.sampler.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace sbs::cli
