#include "jarzmle/models/logistic_regression.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "jarzmle/numerics.hpp"

namespace jarzmle {

BayesianLogisticModel::BayesianLogisticModel(Matrix features, Vector labels,
                                             double sigma0_sq)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      sigma0_sq_(sigma0_sq) {
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("features/labels row mismatch");
  }
  if (!(sigma0_sq_ > 0.0)) throw std::invalid_argument("sigma0_sq must be > 0");
}

double BayesianLogisticModel::potential(const Vector& theta,
                                        const Vector& w) const {
  const Vector z = features_ * w;
  double nll = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    nll += log1pexp(z[i]) - labels_[i] * z[i];
  }
  const Vector centered = w.array() - theta[0];
  return nll + centered.squaredNorm() / (2.0 * sigma0_sq_);
}

Vector BayesianLogisticModel::grad_w(double theta, const Vector& w) const {
  const Vector z = features_ * w;
  Vector probs(z.size());
  for (Index i = 0; i < z.size(); ++i) probs[i] = logistic(z[i]);
  Vector g = features_.transpose() * (probs - labels_);
  g.array() += (w.array() - theta) / sigma0_sq_;
  return g;
}

double BayesianLogisticModel::grad_theta_scalar(double theta,
                                                const Vector& w) const {
  return -(w.array() - theta).sum() / sigma0_sq_;
}

Vector BayesianLogisticModel::grad_x(const Vector& theta,
                                     const Vector& w) const {
  return grad_w(theta[0], w);
}

Vector BayesianLogisticModel::grad_theta(const Vector& theta,
                                         const Vector& w) const {
  Vector g(1);
  g[0] = grad_theta_scalar(theta[0], w);
  return g;
}

PotentialGrad BayesianLogisticModel::potential_and_grad_x(
    const Vector& theta, const Vector& w) const {
  const Vector z = features_ * w;
  double nll = 0.0;
  Vector probs(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    nll += log1pexp(z[i]) - labels_[i] * z[i];
    probs[i] = logistic(z[i]);
  }
  const Eigen::ArrayXd centered = w.array() - theta[0];
  PotentialGrad eval;
  eval.value = nll + 0.5 * centered.square().sum() / sigma0_sq_;
  eval.grad = features_.transpose() * (probs - labels_);
  eval.grad.array() += centered / sigma0_sq_;
  return eval;
}

Matrix BayesianLogisticModel::init_particles(const Vector& theta0, Index n,
                                             RngStream& rng) const {
  const double sd = std::sqrt(sigma0_sq_);
  Matrix positions(n, dim_x());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim_x(); ++j) {
      positions(i, j) = theta0[0] + sd * rng.normal();
    }
  }
  return positions;
}

Vector BayesianLogisticModel::class_probabilities(const Vector& w,
                                                  const Vector& features) const {
  const double p1 = logistic(features.dot(w));
  Vector probs(2);
  probs[0] = 1.0 - p1;
  probs[1] = p1;
  return probs;
}

}  // namespace jarzmle
