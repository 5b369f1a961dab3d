#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sbs/approx/serialize.hpp"
#include "sbs/calibration/checking.hpp"
#include "sbs/data_io.hpp"
#include "sbs/smc/errors.hpp"

using namespace sbs;
using namespace sbs::cli;

namespace {

// Command-line values; unset ones leave the config file (or default) alone.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out, model, data, approx_kind, perturb, approx_file, path;
  std::optional<int> g, g_min, g_max;
  std::optional<std::size_t> particles, replicates;
  bool no_symmetrize = false;
};

// "diag_shrink:5", "diag_inflate:10", "shift:0.5:5" or "none".
approx::Perturbation parse_perturb(const std::string& text) {
  if (text == "none") return {};
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) throw ConfigError("perturbation needs a factor: " + text);
  const std::string kind = text.substr(0, c1);
  const std::string rest = text.substr(c1 + 1);
  try {
    if (kind == "diag_shrink") return approx::Perturbation::diag_shrink(std::stod(rest));
    if (kind == "diag_inflate") return approx::Perturbation::diag_inflate(std::stod(rest));
    if (kind == "shift") {
      const auto c2 = rest.find(':');
      if (c2 == std::string::npos) throw ConfigError("shift needs shift:s:c");
      return approx::Perturbation::shifted(std::stod(rest.substr(0, c2)), std::stod(rest.substr(c2 + 1)));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad perturbation: " + text);
  }
  throw ConfigError("unknown perturbation: " + text);
}

ExperimentConfig resolve(const std::string& config_file, const Overrides& o) {
  ExperimentConfig c;
  if (!config_file.empty()) c = config_from_json(approx::read_json_file(config_file));
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (o.out) c.output_dir = *o.out;
  if (o.model) c.model = parse_model_kind(*o.model);
  if (o.data) c.data = *o.data;
  if (o.approx_kind) c.approx.kind = *o.approx_kind;
  if (o.perturb) c.approx.perturbation = parse_perturb(*o.perturb);
  if (o.approx_file) c.approx.file = *o.approx_file;
  if (o.no_symmetrize) c.approx.symmetrized = false;
  if (o.path) {
    try {
      c.sampler.path = smc::parse_path_variant(*o.path);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.g) c.g = *o.g;
  if (o.g_min) c.g_min = *o.g_min;
  if (o.g_max) c.g_max = *o.g_max;
  if (o.particles) c.sampler.particles = *o.particles;
  if (o.replicates) c.calibration["replicates"] = *o.replicates;
  finalize(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bridge samplers started from posterior approximations"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(version_string()));

  Overrides o;
  std::string config_file;
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--config", config_file, "JSON experiment config");

  auto* fit = app.add_subcommand("fit-approx", "fit and save a posterior approximation");
  auto* sample = app.add_subcommand("sample", "run the bridge sampler");
  auto* select = app.add_subcommand("model-select", "per-g evidence and model averaging (sbmreg)");
  auto* calib = app.add_subcommand("calibrate", "checking procedure on simulated replicates");

  for (auto* sub : {fit, sample, select, calib}) {
    sub->add_option("--model", o.model, "logistic | lca | sbmreg | gaussian");
    sub->add_option("--g", o.g, "number of groups");
    sub->add_option("--particles", o.particles, "particle count M");
    sub->add_flag("--no-symmetrize", o.no_symmetrize, "use the plain VB fit");
  }
  for (auto* sub : {fit, sample, select}) sub->add_option("--data", o.data, "data CSV");
  for (auto* sub : {fit, sample}) {
    sub->add_option("--approx", o.approx_kind, "vb | ml");
    sub->add_option("--perturb", o.perturb, "diag_shrink:c | diag_inflate:c | shift:s:c");
  }
  sample->add_option("--approx-file", o.approx_file, "approximation JSON from fit-approx");
  sample->add_option("--path", o.path, "SBS | CBS | CBS_IS");
  for (auto* sub : {select, calib}) {
    sub->add_option("--g-min", o.g_min, "smallest g");
    sub->add_option("--g-max", o.g_max, "largest g");
  }
  calib->add_option("--replicates", o.replicates, "number of replicates S");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto cfg = resolve(config_file, o);
    if (fit->parsed()) return cmd_fit_approx(cfg);
    if (sample->parsed()) return cmd_sample(cfg);
    if (select->parsed()) return cmd_model_select(cfg);
    return cmd_calibrate(cfg);
  } catch (const IoError& e) {
    std::cerr << "sbs: " << e.what() << '\n';
    return kIo;
  } catch (const smc::DegenerateCloudError& e) {
    std::cerr << "sbs: " << e.what() << '\n';
    return kDegenerate;
  } catch (const calibration::CalibrationFailure& e) {
    std::cerr << "sbs: " << e.what() << '\n';
    return kCalibration;
  } catch (const std::exception& e) {
    std::cerr << "sbs: " << e.what() << '\n';
    return kUsage;
  }
}
