#pragma once

#include "jarzmle/core.hpp"

namespace jarzmle {

// Scalar latent, scalar parameter: U(theta, x) = (x - theta)^2 / 2
// + (y - x)^2 / 2. Everything about this model is available in closed form
// (marginal N(y; theta, 2), posterior N((theta + y)/2, 1/2)), which makes
// it the oracle for most statistical tests.
class ConjugateGaussianModel final : public LatentModel {
 public:
  explicit ConjugateGaussianModel(double y_obs) : y_(y_obs) {}

  Index dim_x() const override { return 1; }
  Index dim_theta() const override { return 1; }

  double potential(const Vector& theta, const Vector& x) const override;
  Vector grad_x(const Vector& theta, const Vector& x) const override;
  Vector grad_theta(const Vector& theta, const Vector& x) const override;
  PotentialGrad potential_and_grad_x(const Vector& theta,
                                     const Vector& x) const override;

  // Exact posterior draws N((theta0 + y)/2, 1/2).
  Matrix init_particles(const Vector& theta0, Index n,
                        RngStream& rng) const override;

  double y_obs() const { return y_; }

  // Closed-form oracles.
  double posterior_mean(double theta) const { return 0.5 * (theta + y_); }
  double posterior_variance() const { return 0.5; }
  double marginal_log_evidence(double theta) const;  // log N(y; theta, 2)
  Vector marginal_grad(const Vector& theta) const;   // (theta - y) / 2

 private:
  double y_;
};

}  // namespace jarzmle
