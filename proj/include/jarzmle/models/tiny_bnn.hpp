#pragma once

#include "jarzmle/classifier.hpp"
#include "jarzmle/core.hpp"

namespace jarzmle {

// Two-layer tanh network with zero biases and a softmax likelihood. The
// latent variable is vec(W1) ++ vec(W2); theta = (a, b) are the log
// standard deviations of the two isotropic Gaussian weight priors, so the
// prior terms carry the D * a and D * b normalizers.
class TinyBnnModel final : public LatentModel, public Classifier {
 public:
  TinyBnnModel(Matrix features, IntVector labels, Index hidden_units = 8,
               Index n_classes = 2);

  Index dim_x() const override { return n_w1_ + n_w2_; }
  Index dim_theta() const override { return 2; }

  double potential(const Vector& theta, const Vector& x) const override;
  Vector grad_x(const Vector& theta, const Vector& x) const override;
  Vector grad_theta(const Vector& theta, const Vector& x) const override;
  PotentialGrad potential_and_grad_x(const Vector& theta,
                                     const Vector& x) const override;

  // Prior draws: W1 ~ N(0, e^{2a} I), W2 ~ N(0, e^{2b} I).
  Matrix init_particles(const Vector& theta0, Index n,
                        RngStream& rng) const override;

  Index n_classes() const override { return n_out_; }
  Vector class_probabilities(const Vector& x,
                             const Vector& features) const override;

  Index hidden_units() const { return hidden_; }

 private:
  struct Unpacked {
    Eigen::Map<const Matrix> w1;
    Eigen::Map<const Matrix> w2;
  };
  Unpacked unpack(const Vector& x) const;

  Matrix features_;   // n x d_in
  IntVector labels_;  // class indices
  Index hidden_;
  Index n_out_;
  Index n_w1_;
  Index n_w2_;
};

}  // namespace jarzmle
