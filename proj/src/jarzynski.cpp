#include "jarzmle/jarzynski.hpp"

#include <cmath>

namespace jarzmle {

double alpha(const LatentModel& model, const Vector& theta, const Vector& x_l,
             const Vector& x_r, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
  const auto eval = model.potential_and_grad_x(theta, x_l);
  if (!std::isfinite(eval.value) || !all_finite(eval.grad)) {
    throw std::runtime_error("non-finite potential or gradient in alpha");
  }
  return alpha_from_eval(eval.value, eval.grad, x_l, x_r, h);
}

Vector ula_step(const Vector& x, const Vector& grad, double h,
                const Vector& noise) {
  return x - h * grad + std::sqrt(2.0 * h) * noise;
}

KernelStepRecord kernel_step(const LatentModel& model, const Vector& theta_k,
                             const Vector& theta_next, const Vector& x,
                             double log_weight, double h, RngStream& rng) {
  const auto at_old = model.potential_and_grad_x(theta_k, x);
  const Vector noise = rng.normal_vector(x.size());
  KernelStepRecord rec;
  rec.new_position = ula_step(x, at_old.grad, h, noise);
  rec.alpha_forward = alpha_from_eval(at_old.value, at_old.grad, x,
                                      rec.new_position, h);
  const auto at_new = model.potential_and_grad_x(theta_next, rec.new_position);
  rec.alpha_backward =
      alpha_from_eval(at_new.value, at_new.grad, rec.new_position, x, h);
  rec.new_log_weight = log_weight - rec.alpha_backward + rec.alpha_forward;
  if (!all_finite(rec.new_position) || !std::isfinite(rec.new_log_weight)) {
    throw std::runtime_error("particle diverged (reduce h)");
  }
  return rec;
}

std::vector<Index> systematic_resample(const Vector& w, double u) {
  const Index n = w.size();
  if (n < 1) throw std::invalid_argument("empty weight vector");
  if (std::abs(w.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("systematic_resample requires normalized weights");
  }
  if (!(u >= 0.0) || u >= 1.0) {
    throw std::invalid_argument("offset u must lie in [0, 1)");
  }
  std::vector<Index> ancestors(static_cast<std::size_t>(n));
  double cumulative = w[0];
  Index i = 0;
  for (Index j = 0; j < n; ++j) {
    const double position = (u + static_cast<double>(j)) / static_cast<double>(n);
    while (!(position < cumulative) && i + 1 < n) {
      ++i;
      cumulative += w[i];
    }
    ancestors[static_cast<std::size_t>(j)] = i;
  }
  return ancestors;
}

ParticleCloud resample_cloud(const ParticleCloud& cloud, RngStream& rng,
                             std::vector<Index>* ancestors_out) {
  const Vector w = normalized_weights(cloud.log_weights);
  const double u = rng.uniform();
  const std::vector<Index> ancestors = systematic_resample(w, u);

  ParticleCloud next;
  next.evidence_segments = cloud.evidence_segments;
  next.evidence_segments.push_back(log_mean_exp(cloud.log_weights));
  next.positions.resize(cloud.positions.rows(), cloud.positions.cols());
  for (Index j = 0; j < cloud.positions.rows(); ++j) {
    next.positions.row(j) = cloud.positions.row(ancestors[static_cast<std::size_t>(j)]);
  }
  next.log_weights = Vector::Zero(cloud.log_weights.size());
  if (ancestors_out != nullptr) *ancestors_out = ancestors;
  return next;
}

}  // namespace jarzmle
