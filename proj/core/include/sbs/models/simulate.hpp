#pragma once

#include <Eigen/Core>

#include "sbs/approx/lca_vb.hpp"
#include "sbs/approx/sbmreg_vb.hpp"
#include "sbs/models/edge_data.hpp"
#include "sbs/models/logistic.hpp"
#include "sbs/models/states.hpp"
#include "sbs/random.hpp"

namespace sbs::models {

struct LogisticDesign {
  Eigen::MatrixXd x;
  double prior_var = 100.0;
};

struct LcaDesign {
  int n = 100;
  int q = 10;
  int g = 2;
  approx::LcaHyper hyper{};
};

/// Covariates are drawn i.i.d. N(0, 1) per dyad when `covariates` is empty.
struct SbmRegDesign {
  int n = 20;
  int p = 3;
  int g = 2;
  approx::SbmRegPriors priors{};
  Eigen::MatrixXd covariates;  // optional, n(n-1)/2 x p in dyad order (i < j, row-major)
};

template <class Theta, class Data>
struct PriorPredictive {
  Theta theta;
  Data data;
};

/// theta* from the prior, then data* from the likelihood at theta*.
PriorPredictive<Eigen::VectorXd, LogisticData> simulate_prior_predictive(
    const LogisticDesign& design, Rng& rng);
PriorPredictive<LcaState, Eigen::MatrixXd> simulate_prior_predictive(const LcaDesign& design,
                                                                     Rng& rng);
PriorPredictive<SbmRegState, EdgeData> simulate_prior_predictive(const SbmRegDesign& design,
                                                                 Rng& rng);

/// Standard logistic design: intercept-free N(0, 1) covariates.
Eigen::MatrixXd gaussian_design(int n, int p, Rng& rng);

}  // namespace sbs::models
