#pragma once

#include <memory>

#include "jarzmle/core.hpp"

namespace jarzmle {

// Gaussian-likelihood linear regression with an isotropic Gaussian prior on
// the weights. theta = (phi1, phi2) = (log sigma^2, log alpha). The
// parameter-dependent normalizing constants are part of U so that
// exp(-U) integrates to the marginal likelihood exactly:
//
//   U(phi, w) = (d_y/2)(log 2pi + phi1) + e^{-phi1} ||y - Xw||^2 / 2
//             + (d_x/2)(log 2pi - phi2) + e^{phi2} ||w||^2 / 2
class GaussianLinRegModel final : public LatentModel {
 public:
  GaussianLinRegModel(Matrix x, Vector y);

  Index dim_x() const override { return x_.cols(); }
  Index dim_theta() const override { return 2; }

  double potential(const Vector& phi, const Vector& w) const override;
  Vector grad_x(const Vector& phi, const Vector& w) const override;
  Vector grad_theta(const Vector& phi, const Vector& w) const override;
  PotentialGrad potential_and_grad_x(const Vector& phi,
                                     const Vector& w) const override;

  // Exact draws from the analytically available posterior at phi0.
  Matrix init_particles(const Vector& phi0, Index n,
                        RngStream& rng) const override;

  // Marginal likelihood log N(y; 0, e^{phi1} I + e^{-phi2} X X^T).
  double log_evidence(const Vector& phi) const;

  const Matrix& design() const { return x_; }
  const Vector& targets() const { return y_; }

 private:
  Matrix x_;  // d_y x d_x
  Vector y_;
};

// Student-t errors with the same weight prior plus an exponential prior on
// the degrees of freedom. theta = (phi1, phi2, phi3) with phi3 = log nu
// clipped to [log 0.2, log 5].
class StudentTLinRegModel final : public LatentModel {
 public:
  static constexpr double kPhi3Min = -1.6094379124341003;  // log 0.2
  static constexpr double kPhi3Max = 1.6094379124341003;   // log 5

  StudentTLinRegModel(Matrix x, Vector y, double nu_prior_rate = 0.1);

  Index dim_x() const override { return x_.cols(); }
  Index dim_theta() const override { return 3; }

  double potential(const Vector& phi, const Vector& w) const override;
  Vector grad_x(const Vector& phi, const Vector& w) const override;
  Vector grad_theta(const Vector& phi, const Vector& w) const override;
  PotentialGrad potential_and_grad_x(const Vector& phi,
                                     const Vector& w) const override;
  Vector clip_theta(Vector phi) const override;

  // Warm start: one 200-step ULA chain per particle targeting the posterior
  // at phi0, started from the prior, with the gradient-norm step adaptation.
  Matrix init_particles(const Vector& phi0, Index n,
                        RngStream& rng) const override;

  // Full analytic parameter gradient; reports whether phi3 had to be
  // clipped before evaluation.
  Vector grad_phi(const Vector& phi, const Vector& w,
                  bool* clipped = nullptr) const;

  // Likelihood alone (no priors): sum_i log St(y_i | x_i^T w, sigma^2, nu).
  double log_likelihood(const Vector& phi, const Vector& w) const;
  // Weight prior alone: log N(w | 0, e^{-phi2} I).
  double log_prior_w(const Vector& phi, const Vector& w) const;

  const Matrix& design() const { return x_; }
  const Vector& targets() const { return y_; }
  double nu_prior_rate() const { return nu_rate_; }

 private:
  Matrix x_;
  Vector y_;
  double nu_rate_;
};

// Design matrix [1, x, x^2, ..., x^order], one row per input.
Matrix polynomial_design(const Vector& x, int order);

// Polynomial feature expansion over a scalar input, delegating to the
// Gaussian regression model on the expanded design.
class PolynomialRegModel final : public LatentModel {
 public:
  PolynomialRegModel(const Vector& x_raw, Vector y, int order);

  Index dim_x() const override { return base_->dim_x(); }
  Index dim_theta() const override { return base_->dim_theta(); }
  double potential(const Vector& phi, const Vector& w) const override {
    return base_->potential(phi, w);
  }
  Vector grad_x(const Vector& phi, const Vector& w) const override {
    return base_->grad_x(phi, w);
  }
  Vector grad_theta(const Vector& phi, const Vector& w) const override {
    return base_->grad_theta(phi, w);
  }
  PotentialGrad potential_and_grad_x(const Vector& phi,
                                     const Vector& w) const override {
    return base_->potential_and_grad_x(phi, w);
  }
  Matrix init_particles(const Vector& phi0, Index n,
                        RngStream& rng) const override {
    return base_->init_particles(phi0, n, rng);
  }

  int order() const { return order_; }
  const GaussianLinRegModel& base() const { return *base_; }

 private:
  int order_;
  std::unique_ptr<GaussianLinRegModel> base_;
};

}  // namespace jarzmle
