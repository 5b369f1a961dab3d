// Writes small simulated data sets in the CSV layouts the CLI reads.
#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sbs/data_io.hpp"
#include "sbs/models/simulate.hpp"
#include "sbs/random.hpp"

using namespace sbs;

int main(int argc, char** argv) {
  CLI::App app{"Simulate example data for the sbs CLI"};
  std::string kind, out;
  std::uint64_t seed = 1;
  int n = 0, g = 2;
  app.add_option("kind", kind, "logistic | lca | sbmreg")->required();
  app.add_option("out", out, "output CSV")->required();
  app.add_option("--seed", seed, "simulation seed");
  app.add_option("--n", n, "observations (logistic, lca) or nodes (sbmreg)");
  app.add_option("--g", g, "true number of groups (lca, sbmreg)");
  CLI11_PARSE(app, argc, argv);

  auto rng = make_stream(seed, StreamTag::kSimulate, 0, 0);
  try {
    if (kind == "logistic") {
      const int rows = n > 0 ? n : 200;
      const Eigen::Vector4d theta(0.5, -0.6, 0.0, -1.0);
      models::LogisticData d;
      d.x = models::gaussian_design(rows, 4, rng);
      d.y.resize(rows);
      for (int i = 0; i < rows; ++i)
        d.y(i) = uniform01(rng) < 1.0 / (1.0 + std::exp(-d.x.row(i).dot(theta))) ? 1.0 : 0.0;
      d.names = {"x1", "x2", "x3", "x4"};
      write_logistic_csv(out, d);
    } else if (kind == "lca") {
      models::LcaDesign design;
      if (n > 0) design.n = n;
      design.g = g;
      write_lca_csv(out, models::simulate_prior_predictive(design, rng).data);
    } else if (kind == "sbmreg") {
      models::SbmRegDesign design;
      if (n > 0) design.n = n;
      design.g = g;
      write_edge_csv(out, models::simulate_prior_predictive(design, rng).data);
    } else {
      std::cerr << "unknown kind: " << kind << '\n';
      return 1;
    }
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
