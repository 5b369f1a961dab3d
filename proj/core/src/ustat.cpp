#include "sbs/calibration/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sbs/random.hpp"

namespace sbs::calibration {

double u_statistic(double phi_star, std::span<const double> phi_sample,
                   std::span<const double> weights) {
  if (phi_sample.empty()) throw std::invalid_argument("u_statistic: empty sample");
  if (phi_sample.size() != weights.size())
    throw std::invalid_argument("u_statistic: sample and weights differ in length");
  double u = 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < phi_sample.size(); ++m) {
    total += weights[m];
    if (phi_sample[m] < phi_star) {
      u += weights[m];
    } else if (phi_sample[m] == phi_star) {
      u += 0.5 * weights[m];
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("u_statistic: weights sum to zero");
  return std::clamp(u / total, 0.0, 1.0);
}

double u_statistic(double phi_star, std::span<const double> phi_sample) {
  std::vector<double> w(phi_sample.size(), 1.0);
  return u_statistic(phi_star, phi_sample, w);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = 2.0 * k - 1.0;
      s += std::exp(-t * t * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

namespace {

double ks_continuous_stat(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double s = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::clamp(u[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / s - x, x - static_cast<double>(i) / s});
  }
  return d;
}

// Sup distance between the empirical CDF of values on the lattice
// {0, 1/(L-1), ..., 1} (snapped to the nearest point) and the discrete uniform CDF.
double ks_lattice_stat(std::span<const double> u, int lattice) {
  const int steps = lattice - 1;
  std::vector<double> counts(static_cast<std::size_t>(lattice), 0.0);
  for (double v : u) {
    const auto idx = static_cast<std::size_t>(
        std::clamp(static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * steps)), 0, steps));
    counts[idx] += 1.0;
  }
  const double s = static_cast<double>(u.size());
  double cum = 0.0;
  double d = 0.0;
  for (int k = 0; k < lattice; ++k) {
    cum += counts[static_cast<std::size_t>(k)];
    d = std::max(d, std::abs(cum / s - static_cast<double>(k + 1) / lattice));
  }
  return d;
}

}  // namespace

KsResult ks_uniform_test(std::span<const double> u_values, std::optional<int> lattice_size,
                         std::uint64_t seed, int null_draws) {
  if (u_values.size() < 10) throw std::invalid_argument("ks_uniform_test: need at least 10 values");
  for (double v : u_values) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ks_uniform_test: values must lie in [0,1]");
  }
  KsResult out;
  const std::size_t s = u_values.size();
  if (!lattice_size) {
    out.statistic = ks_continuous_stat(std::vector<double>(u_values.begin(), u_values.end()));
    const double rs = std::sqrt(static_cast<double>(s));
    out.p_value = kolmogorov_survival((rs + 0.12 + 0.11 / rs) * out.statistic);
    return out;
  }
  const int lattice = *lattice_size;
  if (lattice < 2) throw std::invalid_argument("ks_uniform_test: lattice size must be >= 2");
  if (null_draws < 1) throw std::invalid_argument("ks_uniform_test: need null draws");
  out.statistic = ks_lattice_stat(u_values, lattice);
  Rng rng = make_stream(seed, StreamTag::kAux, 0, 0);
  std::uniform_int_distribution<int> pick(0, lattice - 1);
  std::vector<double> sim(s);
  int exceed = 0;
  for (int r = 0; r < null_draws; ++r) {
    for (auto& v : sim) v = static_cast<double>(pick(rng)) / (lattice - 1);
    if (ks_lattice_stat(sim, lattice) >= out.statistic - 1e-12) ++exceed;
  }
  out.p_value = (1.0 + exceed) / (1.0 + null_draws);
  return out;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult out;
  out.statistic = d;
  out.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double prob) {
  if (values.empty() || values.size() != weights.size())
    throw std::invalid_argument("weighted_quantile: bad input");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cum = 0.0;
  for (std::size_t idx : order) {
    cum += weights[idx];
    if (cum >= prob * total) return values[idx];
  }
  return values[order.back()];
}

bool interval_contains(const CoverageCase& c, double level) {
  const double tail = 0.5 * (1.0 - level);
  const double lo = weighted_quantile(c.values, c.weights, tail);
  const double hi = weighted_quantile(c.values, c.weights, 1.0 - tail);
  return lo <= c.theta_star && c.theta_star <= hi;
}

double ci_coverage(std::span<const CoverageCase> cases, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ci_coverage: level must lie in (0,1)");
  if (cases.empty()) throw std::invalid_argument("ci_coverage: no replicates");
  double hit = 0.0;
  for (const auto& c : cases) hit += interval_contains(c, level) ? 1.0 : 0.0;
  return hit / static_cast<double>(cases.size());
}

}  // namespace sbs::calibration
