#include "sbs/approx/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbs/math.hpp"

namespace sbs::approx {

GaussianApprox::GaussianApprox(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
    throw std::invalid_argument("GaussianApprox: dimension mismatch");
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("GaussianApprox: covariance is not symmetric");
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("GaussianApprox: covariance is not positive definite");
  chol_l_ = llt.matrixL();
  log_det_ = 2.0 * chol_l_.diagonal().array().log().sum();
}

GaussianApprox GaussianApprox::isotropic(Eigen::Index dim, double variance) {
  return GaussianApprox(Eigen::VectorXd::Zero(dim),
                        Eigen::MatrixXd::Identity(dim, dim) * variance);
}

double GaussianApprox::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z =
      chol_l_.triangularView<Eigen::Lower>().solve(x - mean_);
  return -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det_ + z.squaredNorm());
}

Eigen::VectorXd GaussianApprox::sample(Rng& rng) const {
  Eigen::VectorXd z(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) z(i) = std_normal(rng);
  return mean_ + chol_l_ * z;
}

GaussianApprox GaussianApprox::marginal(Eigen::Index start, Eigen::Index size) const {
  return GaussianApprox(mean_.segment(start, size), covariance_.block(start, start, size, size));
}

GaussianApprox perturb_approx(const GaussianApprox& approx, const Perturbation& variant) {
  using Kind = Perturbation::Kind;
  if (variant.kind == Kind::kNone) return approx;
  if (!(variant.factor > 0.0)) throw std::invalid_argument("perturb_approx: factor must be positive");
  Eigen::VectorXd var = approx.covariance().diagonal();
  Eigen::VectorXd mean = approx.mean();
  switch (variant.kind) {
    case Kind::kDiagShrink: var /= variant.factor; break;
    case Kind::kDiagInflate: var *= variant.factor; break;
    case Kind::kShift:
      var /= variant.factor;
      mean.array() += variant.shift;
      break;
    case Kind::kNone: break;
  }
  return GaussianApprox(std::move(mean), var.asDiagonal().toDenseMatrix());
}

}  // namespace sbs::approx
