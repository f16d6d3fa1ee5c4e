#include "jarzmle/models/tiny_bnn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "jarzmle/numerics.hpp"

namespace jarzmle {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

TinyBnnModel::TinyBnnModel(Matrix features, IntVector labels,
                           Index hidden_units, Index n_classes)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      hidden_(hidden_units),
      n_out_(n_classes) {
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("features/labels row mismatch");
  }
  if (hidden_ < 1 || n_out_ < 2) {
    throw std::invalid_argument("need hidden >= 1 and n_classes >= 2");
  }
  for (Index i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= n_out_) {
      throw std::invalid_argument("label out of range");
    }
  }
  n_w1_ = hidden_ * features_.cols();
  n_w2_ = n_out_ * hidden_;
}

TinyBnnModel::Unpacked TinyBnnModel::unpack(const Vector& x) const {
  // W1 is hidden x d_in, W2 is n_out x hidden, both column-major slices
  return {Eigen::Map<const Matrix>(x.data(), hidden_, features_.cols()),
          Eigen::Map<const Matrix>(x.data() + n_w1_, n_out_, hidden_)};
}

double TinyBnnModel::potential(const Vector& theta, const Vector& x) const {
  const auto [w1, w2] = unpack(x);
  const double a = theta[0];
  const double b = theta[1];

  double nll = 0.0;
  for (Index i = 0; i < features_.rows(); ++i) {
    const Vector hidden = (w1 * features_.row(i).transpose()).array().tanh();
    const Vector logits = w2 * hidden;
    nll += log_sum_exp(logits) - logits[labels_[i]];
  }
  const double d1 = static_cast<double>(n_w1_);
  const double d2 = static_cast<double>(n_w2_);
  const double prior =
      0.5 * d1 * kLog2Pi + d1 * a + 0.5 * std::exp(-2.0 * a) * w1.squaredNorm() +
      0.5 * d2 * kLog2Pi + d2 * b + 0.5 * std::exp(-2.0 * b) * w2.squaredNorm();
  return nll + prior;
}

PotentialGrad TinyBnnModel::potential_and_grad_x(const Vector& theta,
                                                 const Vector& x) const {
  const auto [w1, w2] = unpack(x);
  const double a = theta[0];
  const double b = theta[1];

  double nll = 0.0;
  Matrix g1 = Matrix::Zero(hidden_, features_.cols());
  Matrix g2 = Matrix::Zero(n_out_, hidden_);
  for (Index i = 0; i < features_.rows(); ++i) {
    const Vector f = features_.row(i).transpose();
    const Vector hidden = (w1 * f).array().tanh();
    const Vector logits = w2 * hidden;
    const double lse = log_sum_exp(logits);
    nll += lse - logits[labels_[i]];

    Vector delta = (logits.array() - lse).exp();  // softmax
    delta[labels_[i]] -= 1.0;
    g2 += delta * hidden.transpose();
    const Vector back = (w2.transpose() * delta).array() *
                        (1.0 - hidden.array().square());
    g1 += back * f.transpose();
  }

  const double d1 = static_cast<double>(n_w1_);
  const double d2 = static_cast<double>(n_w2_);
  const double inv_var1 = std::exp(-2.0 * a);
  const double inv_var2 = std::exp(-2.0 * b);

  PotentialGrad eval;
  eval.value = nll + 0.5 * d1 * kLog2Pi + d1 * a +
               0.5 * inv_var1 * w1.squaredNorm() + 0.5 * d2 * kLog2Pi + d2 * b +
               0.5 * inv_var2 * w2.squaredNorm();
  g1 += inv_var1 * w1;
  g2 += inv_var2 * w2;
  eval.grad.resize(dim_x());
  Eigen::Map<Matrix>(eval.grad.data(), hidden_, features_.cols()) = g1;
  Eigen::Map<Matrix>(eval.grad.data() + n_w1_, n_out_, hidden_) = g2;
  return eval;
}

Vector TinyBnnModel::grad_x(const Vector& theta, const Vector& x) const {
  return potential_and_grad_x(theta, x).grad;
}

Vector TinyBnnModel::grad_theta(const Vector& theta, const Vector& x) const {
  const auto [w1, w2] = unpack(x);
  Vector g(2);
  g[0] = static_cast<double>(n_w1_) -
         std::exp(-2.0 * theta[0]) * w1.squaredNorm();
  g[1] = static_cast<double>(n_w2_) -
         std::exp(-2.0 * theta[1]) * w2.squaredNorm();
  return g;
}

Matrix TinyBnnModel::init_particles(const Vector& theta0, Index n,
                                    RngStream& rng) const {
  const double sd1 = std::exp(theta0[0]);
  const double sd2 = std::exp(theta0[1]);
  Matrix positions(n, dim_x());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n_w1_; ++j) positions(i, j) = sd1 * rng.normal();
    for (Index j = n_w1_; j < dim_x(); ++j) positions(i, j) = sd2 * rng.normal();
  }
  return positions;
}

Vector TinyBnnModel::class_probabilities(const Vector& x,
                                         const Vector& features) const {
  const auto [w1, w2] = unpack(x);
  const Vector hidden = (w1 * features).array().tanh();
  const Vector logits = w2 * hidden;
  const double lse = log_sum_exp(logits);
  return (logits.array() - lse).exp();
}

}  // namespace jarzmle
