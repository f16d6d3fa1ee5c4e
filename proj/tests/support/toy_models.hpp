#pragma once

// Tiny hand-rolled models used as independent oracles in tests. These stay
// out of the shipped library on purpose.

#include "jarzmle/core.hpp"

namespace jarzmle::testing {

// U(theta, x) = |x|^2 / 2 regardless of theta: a frozen standard Gaussian
// target with exact moments.
class StaticGaussianModel final : public LatentModel {
 public:
  explicit StaticGaussianModel(Index dim = 1) : dim_(dim) {}

  Index dim_x() const override { return dim_; }
  Index dim_theta() const override { return 1; }

  double potential(const Vector&, const Vector& x) const override {
    return 0.5 * x.squaredNorm();
  }
  Vector grad_x(const Vector&, const Vector& x) const override { return x; }
  Vector grad_theta(const Vector&, const Vector&) const override {
    return Vector::Zero(1);
  }
  Matrix init_particles(const Vector&, Index n, RngStream& rng) const override {
    Matrix positions(n, dim_);
    for (Index i = 0; i < n; ++i) {
      positions.row(i) = rng.normal_vector(dim_).transpose();
    }
    return positions;
  }

 private:
  Index dim_;
};

// U identically constant; gradients vanish everywhere.
class ConstantPotentialModel final : public LatentModel {
 public:
  explicit ConstantPotentialModel(double value, Index dim = 1)
      : value_(value), dim_(dim) {}

  Index dim_x() const override { return dim_; }
  Index dim_theta() const override { return 1; }

  double potential(const Vector&, const Vector&) const override { return value_; }
  Vector grad_x(const Vector&, const Vector&) const override {
    return Vector::Zero(dim_);
  }
  Vector grad_theta(const Vector&, const Vector&) const override {
    return Vector::Zero(1);
  }
  Matrix init_particles(const Vector&, Index n, RngStream& rng) const override {
    Matrix positions(n, dim_);
    for (Index i = 0; i < n; ++i) {
      positions.row(i) = rng.normal_vector(dim_).transpose();
    }
    return positions;
  }

 private:
  double value_;
  Index dim_;
};

}  // namespace jarzmle::testing
