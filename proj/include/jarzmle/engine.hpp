#pragma once

#include <functional>
#include <vector>

#include "jarzmle/core.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

struct FitResult {
  Vector theta_final;
  Vector weights_final;
  Matrix positions_final;
  Trajectory trajectory;
  double log_evidence_final = 0.0;
  // Terminal cloud with its unnormalized log-weights and evidence segments,
  // for callers that audit the evidence decomposition.
  ParticleCloud cloud_final;
};

enum class StepControl { Continue, Stop };

// Invoked after iteration k completes, with the state that opens iteration
// k + 1. Returning Stop truncates the run (used by tuning's early stop).
using StepCallback = std::function<StepControl(
    long k, const Vector& theta, const Matrix& positions, const Vector& weights)>;

// Weighted average of the parameter gradient over the cloud,
// g = sum_i w_i grad_theta U(theta, X^i).
Vector estimate_gradient(const ParticleCloud& cloud, const LatentModel& model,
                         const Vector& theta);

// The full outer loop. Per iteration: normalize weights, estimate the
// parameter gradient, advance theta, sweep the particles (drift at the old
// theta, backward alpha at the new one), then resample if ESS / N fell
// below the configured fraction. log_z0 anchors the evidence estimate and
// may be 0 when evidence is not of interest.
FitResult run_jala_em(const LatentModel& model, const RunConfig& config,
                      double log_z0 = 0.0,
                      const StepCallback& on_iteration = {});

struct MseProbePoint {
  long n_particles = 0;
  double mse = 0.0;
};

// Empirical MSE of the gradient estimator against the exact marginal
// gradient, per particle count. Each trial runs a short weighted sweep at
// frozen theta and compares the estimate with marginal_grad(theta).
std::vector<MseProbePoint> mse_scaling_probe(
    const LatentModel& model, const Vector& theta_fixed,
    const std::function<Vector(const Vector&)>& marginal_grad,
    const std::vector<long>& particle_counts, long trials, std::uint64_t seed);

// Log-log OLS slope of MSE against N; the probe's scaling diagnostic.
double mse_loglog_slope(const std::vector<MseProbePoint>& points);

}  // namespace jarzmle
