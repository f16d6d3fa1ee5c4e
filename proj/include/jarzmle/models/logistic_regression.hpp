#pragma once

#include "jarzmle/classifier.hpp"
#include "jarzmle/core.hpp"

namespace jarzmle {

// Bernoulli likelihood with an isotropic Gaussian prior on the regression
// weights centered at theta * 1. The latent variable is the weight vector;
// theta is the scalar prior mean.
//
//   U(theta, w) = sum_i [log(1 + e^{x_i^T w}) - y_i x_i^T w]
//               + ||w - theta * 1||^2 / (2 sigma0^2)
class BayesianLogisticModel final : public LatentModel, public Classifier {
 public:
  BayesianLogisticModel(Matrix features, Vector labels, double sigma0_sq = 5.0);

  Index dim_x() const override { return features_.cols(); }
  Index dim_theta() const override { return 1; }

  double potential(const Vector& theta, const Vector& w) const override;
  Vector grad_x(const Vector& theta, const Vector& w) const override;
  Vector grad_theta(const Vector& theta, const Vector& w) const override;
  PotentialGrad potential_and_grad_x(const Vector& theta,
                                     const Vector& w) const override;

  // Prior draws N(theta0 * 1, sigma0^2 I).
  Matrix init_particles(const Vector& theta0, Index n,
                        RngStream& rng) const override;

  // Named forms of the analytic gradients.
  Vector grad_w(double theta, const Vector& w) const;
  double grad_theta_scalar(double theta, const Vector& w) const;

  Index n_classes() const override { return 2; }
  Vector class_probabilities(const Vector& w,
                             const Vector& features) const override;

  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  double sigma0_sq() const { return sigma0_sq_; }

 private:
  Matrix features_;  // d_y x d_x, standardized
  Vector labels_;    // entries in {0, 1}
  double sigma0_sq_;
};

}  // namespace jarzmle
