#include "jarzmle/models/linear_regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "jarzmle/jarzynski.hpp"
#include "jarzmle/numerics.hpp"

namespace jarzmle {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Cholesky of the posterior precision X^T X / sigma_sq + alpha I; shared by
// the exact posterior samplers.
Eigen::LLT<Matrix> posterior_precision_llt(const Matrix& x, double sigma_sq,
                                           double alpha) {
  Matrix precision = x.transpose() * x / sigma_sq;
  precision.diagonal().array() += alpha;
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "posterior covariance not positive definite (min precision diagonal " +
        std::to_string(precision.diagonal().minCoeff()) + ")");
  }
  return llt;
}

}  // namespace

GaussianLinRegModel::GaussianLinRegModel(Matrix x, Vector y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) throw std::invalid_argument("X/y row mismatch");
}

double GaussianLinRegModel::potential(const Vector& phi,
                                      const Vector& w) const {
  const double d_y = static_cast<double>(y_.size());
  const double d_x = static_cast<double>(w.size());
  const Vector r = y_ - x_ * w;
  return 0.5 * d_y * (kLog2Pi + phi[0]) +
         0.5 * std::exp(-phi[0]) * r.squaredNorm() +
         0.5 * d_x * (kLog2Pi - phi[1]) + 0.5 * std::exp(phi[1]) * w.squaredNorm();
}

Vector GaussianLinRegModel::grad_x(const Vector& phi, const Vector& w) const {
  const Vector r = y_ - x_ * w;
  return -std::exp(-phi[0]) * (x_.transpose() * r) + std::exp(phi[1]) * w;
}

Vector GaussianLinRegModel::grad_theta(const Vector& phi,
                                       const Vector& w) const {
  const Vector r = y_ - x_ * w;
  Vector g(2);
  g[0] = 0.5 * static_cast<double>(y_.size()) -
         0.5 * std::exp(-phi[0]) * r.squaredNorm();
  g[1] = -0.5 * static_cast<double>(w.size()) +
         0.5 * std::exp(phi[1]) * w.squaredNorm();
  return g;
}

PotentialGrad GaussianLinRegModel::potential_and_grad_x(const Vector& phi,
                                                        const Vector& w) const {
  const double d_y = static_cast<double>(y_.size());
  const double d_x = static_cast<double>(w.size());
  const double inv_sigma_sq = std::exp(-phi[0]);
  const double alpha = std::exp(phi[1]);
  const Vector r = y_ - x_ * w;
  PotentialGrad eval;
  eval.value = 0.5 * d_y * (kLog2Pi + phi[0]) +
               0.5 * inv_sigma_sq * r.squaredNorm() +
               0.5 * d_x * (kLog2Pi - phi[1]) + 0.5 * alpha * w.squaredNorm();
  eval.grad = -inv_sigma_sq * (x_.transpose() * r) + alpha * w;
  return eval;
}

Matrix GaussianLinRegModel::init_particles(const Vector& phi0, Index n,
                                           RngStream& rng) const {
  const double sigma_sq = std::exp(phi0[0]);
  const double alpha = std::exp(phi0[1]);
  const auto llt = posterior_precision_llt(x_, sigma_sq, alpha);
  const Vector mean = llt.solve(x_.transpose() * y_ / sigma_sq);
  // precision = L L^T, so L^{-T} z has the posterior covariance
  Matrix positions(n, dim_x());
  for (Index i = 0; i < n; ++i) {
    const Vector z = rng.normal_vector(dim_x());
    positions.row(i) = (mean + llt.matrixU().solve(z)).transpose();
  }
  return positions;
}

double GaussianLinRegModel::log_evidence(const Vector& phi) const {
  const double sigma_sq = std::exp(phi[0]);
  const double alpha = std::exp(phi[1]);
  const Index d_y = y_.size();
  Matrix cov = x_ * x_.transpose() / alpha;
  cov.diagonal().array() += sigma_sq;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("evidence covariance factorization failed");
  }
  const double log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double quad = y_.dot(llt.solve(y_));
  return -0.5 * (static_cast<double>(d_y) * kLog2Pi + log_det + quad);
}

StudentTLinRegModel::StudentTLinRegModel(Matrix x, Vector y,
                                         double nu_prior_rate)
    : x_(std::move(x)), y_(std::move(y)), nu_rate_(nu_prior_rate) {
  if (x_.rows() != y_.size()) throw std::invalid_argument("X/y row mismatch");
  if (!(nu_rate_ > 0.0)) throw std::invalid_argument("nu prior rate must be > 0");
}

Vector StudentTLinRegModel::clip_theta(Vector phi) const {
  phi[2] = std::clamp(phi[2], kPhi3Min, kPhi3Max);
  return phi;
}

double StudentTLinRegModel::log_likelihood(const Vector& phi,
                                           const Vector& w) const {
  const double sigma_sq = std::exp(phi[0]);
  const double nu = std::exp(phi[2]);
  const double per_datum_const =
      log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
      0.5 * std::log(std::numbers::pi * nu * sigma_sq);
  const Vector r = y_ - x_ * w;
  double ll = static_cast<double>(r.size()) * per_datum_const;
  for (Index i = 0; i < r.size(); ++i) {
    ll -= 0.5 * (nu + 1.0) * std::log1p(r[i] * r[i] / (nu * sigma_sq));
  }
  return ll;
}

double StudentTLinRegModel::log_prior_w(const Vector& phi,
                                        const Vector& w) const {
  const double d_x = static_cast<double>(w.size());
  return -0.5 * d_x * (kLog2Pi - phi[1]) -
         0.5 * std::exp(phi[1]) * w.squaredNorm();
}

double StudentTLinRegModel::potential(const Vector& phi,
                                      const Vector& w) const {
  const Vector p = clip_theta(phi);
  const double nu = std::exp(p[2]);
  // exponential prior on nu rides along in the joint potential
  return -log_likelihood(p, w) - log_prior_w(p, w) - std::log(nu_rate_) +
         nu_rate_ * nu;
}

Vector StudentTLinRegModel::grad_x(const Vector& phi, const Vector& w) const {
  const Vector p = clip_theta(phi);
  const double sigma_sq = std::exp(p[0]);
  const double nu = std::exp(p[2]);
  const Vector r = y_ - x_ * w;
  Vector scale(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    scale[i] = (nu + 1.0) * r[i] / (nu * sigma_sq + r[i] * r[i]);
  }
  return -(x_.transpose() * scale) + std::exp(p[1]) * w;
}

Vector StudentTLinRegModel::grad_phi(const Vector& phi, const Vector& w,
                                     bool* clipped) const {
  const Vector p = clip_theta(phi);
  if (clipped != nullptr) *clipped = (p[2] != phi[2]);
  const double sigma_sq = std::exp(p[0]);
  const double nu = std::exp(p[2]);
  const double d_y = static_cast<double>(y_.size());
  const Vector r = y_ - x_ * w;

  double frac_sum = 0.0;      // sum r^2 / (nu sigma^2 + r^2)
  double log_term_sum = 0.0;  // sum log(1 + r^2 / (nu sigma^2))
  for (Index i = 0; i < r.size(); ++i) {
    const double r_sq = r[i] * r[i];
    frac_sum += r_sq / (nu * sigma_sq + r_sq);
    log_term_sum += std::log1p(r_sq / (nu * sigma_sq));
  }

  Vector g(3);
  g[0] = 0.5 * d_y - 0.5 * (nu + 1.0) * frac_sum;
  g[1] = -0.5 * static_cast<double>(w.size()) +
         0.5 * std::exp(p[1]) * w.squaredNorm();
  const double du_dnu = d_y * (-0.5 * digamma(0.5 * (nu + 1.0)) +
                               0.5 * digamma(0.5 * nu) + 0.5 / nu) +
                        0.5 * log_term_sum -
                        0.5 * (nu + 1.0) * frac_sum / nu + nu_rate_;
  g[2] = nu * du_dnu;
  return g;
}

Vector StudentTLinRegModel::grad_theta(const Vector& phi,
                                       const Vector& w) const {
  return grad_phi(phi, w);
}

PotentialGrad StudentTLinRegModel::potential_and_grad_x(const Vector& phi,
                                                        const Vector& w) const {
  const Vector p = clip_theta(phi);
  const double sigma_sq = std::exp(p[0]);
  const double nu = std::exp(p[2]);
  const double alpha = std::exp(p[1]);
  const double d_y = static_cast<double>(y_.size());
  const double d_x = static_cast<double>(w.size());
  const Vector r = y_ - x_ * w;

  const double per_datum_const =
      log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) -
      0.5 * std::log(std::numbers::pi * nu * sigma_sq);
  double value = -d_y * per_datum_const + 0.5 * d_x * (kLog2Pi - p[1]) +
                 0.5 * alpha * w.squaredNorm() - std::log(nu_rate_) +
                 nu_rate_ * nu;
  Vector scale(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    const double r_sq = r[i] * r[i];
    value += 0.5 * (nu + 1.0) * std::log1p(r_sq / (nu * sigma_sq));
    scale[i] = (nu + 1.0) * r[i] / (nu * sigma_sq + r_sq);
  }
  PotentialGrad eval;
  eval.value = value;
  eval.grad = -(x_.transpose() * scale) + alpha * w;
  return eval;
}

Matrix StudentTLinRegModel::init_particles(const Vector& phi0, Index n,
                                           RngStream& rng) const {
  constexpr long kChainSteps = 200;
  const Vector p = clip_theta(phi0);
  const double prior_sd = std::exp(-0.5 * p[1]);
  const double d_x = static_cast<double>(dim_x());

  Matrix positions(n, dim_x());
  for (Index i = 0; i < n; ++i) {
    Vector w = prior_sd * rng.normal_vector(dim_x());
    double step = 1e-3;
    for (long t = 0; t < kChainSteps; ++t) {
      const Vector grad = grad_x(p, w);
      w = ula_step(w, grad, step, rng.normal_vector(dim_x()));
      const double g_norm = grad.norm();
      if (g_norm > 1000.0 * d_x && step > 1e-6) {
        step *= 0.9;
      } else if (g_norm < 10.0 * d_x && step < 0.1) {
        step *= 1.05;
      }
    }
    positions.row(i) = w.transpose();
  }
  return positions;
}

Matrix polynomial_design(const Vector& x, int order) {
  if (order < 0) throw std::invalid_argument("order must be >= 0");
  Matrix design(x.size(), order + 1);
  for (Index i = 0; i < x.size(); ++i) {
    for (int j = 0; j <= order; ++j) {
      design(i, j) = std::pow(x[i], j);
    }
  }
  return design;
}

PolynomialRegModel::PolynomialRegModel(const Vector& x_raw, Vector y, int order)
    : order_(order),
      base_(std::make_unique<GaussianLinRegModel>(polynomial_design(x_raw, order),
                                                  std::move(y))) {}

}  // namespace jarzmle
