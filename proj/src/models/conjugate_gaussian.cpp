#include "jarzmle/models/conjugate_gaussian.hpp"

#include <cmath>
#include <numbers>

namespace jarzmle {

double ConjugateGaussianModel::potential(const Vector& theta,
                                         const Vector& x) const {
  const double dx = x[0] - theta[0];
  const double dy = y_ - x[0];
  return 0.5 * dx * dx + 0.5 * dy * dy;
}

Vector ConjugateGaussianModel::grad_x(const Vector& theta,
                                      const Vector& x) const {
  Vector g(1);
  g[0] = (x[0] - theta[0]) + (x[0] - y_);
  return g;
}

Vector ConjugateGaussianModel::grad_theta(const Vector& theta,
                                          const Vector& x) const {
  Vector g(1);
  g[0] = theta[0] - x[0];
  return g;
}

PotentialGrad ConjugateGaussianModel::potential_and_grad_x(
    const Vector& theta, const Vector& x) const {
  return {potential(theta, x), grad_x(theta, x)};
}

Matrix ConjugateGaussianModel::init_particles(const Vector& theta0, Index n,
                                              RngStream& rng) const {
  const double mean = posterior_mean(theta0[0]);
  const double sd = std::sqrt(posterior_variance());
  Matrix positions(n, 1);
  for (Index i = 0; i < n; ++i) positions(i, 0) = mean + sd * rng.normal();
  return positions;
}

double ConjugateGaussianModel::marginal_log_evidence(double theta) const {
  const double d = y_ - theta;
  return -0.5 * std::log(4.0 * std::numbers::pi) - d * d / 4.0;
}

Vector ConjugateGaussianModel::marginal_grad(const Vector& theta) const {
  Vector g(1);
  g[0] = 0.5 * (theta[0] - y_);
  return g;
}

}  // namespace jarzmle
