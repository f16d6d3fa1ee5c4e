#pragma once

#include <stdexcept>
#include <vector>

#include "jarzmle/core.hpp"
#include "jarzmle/numerics.hpp"
#include "jarzmle/rng.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

// Normalized importance weights from unnormalized log-weights, computed
// with max subtraction. Throws when every weight underflows.
template <typename Derived>
Vector normalized_weights(const Eigen::DenseBase<Derived>& log_w) {
  if (log_w.size() < 1) throw std::invalid_argument("empty weight vector");
  const double m = log_w.derived().maxCoeff();
  if (!std::isfinite(m)) {
    throw std::runtime_error("weight degeneracy: all weights zero");
  }
  Vector w = (log_w.derived().array() - m).exp();
  return w / w.sum();
}

// Effective sample size 1 / sum w_i^2, in [1, N] for normalized w.
template <typename Derived>
double ess(const Eigen::DenseBase<Derived>& w) {
  return 1.0 / w.derived().array().square().sum();
}

// One-shot transition quantity
//   U(x_l) + (1/2)(x_r - x_l) . grad U(x_l) + (h/4) |grad U(x_l)|^2
// evaluated from a cached (value, gradient) pair at x_l.
inline double alpha_from_eval(double u_l, const Vector& grad_l,
                              const Vector& x_l, const Vector& x_r, double h) {
  return u_l + 0.5 * (x_r - x_l).dot(grad_l) + 0.25 * h * grad_l.squaredNorm();
}

double alpha(const LatentModel& model, const Vector& theta, const Vector& x_l,
             const Vector& x_r, double h);

// Euler-Maruyama Langevin move x - h * grad + sqrt(2h) * noise; the caller
// owns the noise draw.
Vector ula_step(const Vector& x, const Vector& grad, double h,
                const Vector& noise);

struct KernelStepRecord {
  Vector new_position;
  double new_log_weight = 0.0;
  double alpha_forward = 0.0;   // alpha at theta_k, from the old position
  double alpha_backward = 0.0;  // alpha at theta_next, from the new position
};

// Weighted-ULA transition: ULA move with drift at theta_k, log-weight
// increment alpha_forward - alpha_backward. For a static target pass the
// same parameter vector twice.
KernelStepRecord kernel_step(const LatentModel& model, const Vector& theta_k,
                             const Vector& theta_next, const Vector& x,
                             double log_weight, double h, RngStream& rng);

inline KernelStepRecord kernel_step(const LatentModel& model,
                                    const Vector& theta, const Vector& x,
                                    double log_weight, double h,
                                    RngStream& rng) {
  return kernel_step(model, theta, theta, x, log_weight, h, rng);
}

// Systematic resampling: ancestor counts are floor/ceil of N * w_i, O(N),
// deterministic given (w, u). Ties against the cumulative weights broken
// by strict inequality.
std::vector<Index> systematic_resample(const Vector& w, double u);

// Consumes the current weights into a new evidence segment
// log((1/N) sum exp(A_i)), replaces positions by systematically resampled
// ancestors and resets all log-weights to zero. Optionally reports the
// ancestor indices so callers can permute side caches.
ParticleCloud resample_cloud(const ParticleCloud& cloud, RngStream& rng,
                             std::vector<Index>* ancestors = nullptr);

}  // namespace jarzmle
