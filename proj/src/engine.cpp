#include "jarzmle/engine.hpp"

#include <cmath>
#include <utility>

#include "jarzmle/jarzynski.hpp"
#include "jarzmle/numerics.hpp"

namespace jarzmle {

Vector estimate_gradient(const ParticleCloud& cloud, const LatentModel& model,
                         const Vector& theta) {
  const Vector w = normalized_weights(cloud.log_weights);
  Vector g = Vector::Zero(model.dim_theta());
  for (Index i = 0; i < cloud.particle_count(); ++i) {
    g += w[i] * model.grad_theta(theta, cloud.positions.row(i).transpose());
  }
  return g;
}

namespace {

Vector shape_gradient(Vector g, const RunConfig& config) {
  const double norm = g.norm();
  if (norm > config.gradient_clip_norm) {
    g *= config.gradient_clip_norm / norm;
  }
  if (config.normalize_gradient && norm > 0.0) {
    g /= g.norm();
  }
  return g;
}

}  // namespace

FitResult run_jala_em(const LatentModel& model, const RunConfig& config,
                      double log_z0, const StepCallback& on_iteration) {
  config.validate();
  const Index n = config.n_particles;
  const Index d = model.dim_x();
  const double h = config.langevin_step;

  ThetaState state =
      ThetaState::init(model.clip_theta(config.theta_init), config.optimizer);

  RngStream init_rng(stream_key(config.seed, rng_tag::kInit));
  ParticleCloud cloud =
      ParticleCloud::from_positions(model.init_particles(state.theta, n, init_rng));
  if (cloud.positions.rows() != n || cloud.positions.cols() != d) {
    throw std::runtime_error("init_particles returned wrong shape");
  }

  // (U, grad_x) at the theta used for the next drift, kept current across
  // iterations: after the sweep these hold evaluations at theta_{k+1}.
  std::vector<PotentialGrad> cache(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    cache[static_cast<std::size_t>(i)] =
        model.potential_and_grad_x(state.theta, cloud.positions.row(i).transpose());
  }

  Trajectory trajectory;
  trajectory.rows.reserve(static_cast<std::size_t>(config.n_iterations) + 1);
  bool resampled_into_state = false;

  const auto record_row = [&](long k, const Vector& w) {
    TrajectoryRow row;
    row.k = k;
    row.theta = state.theta;
    row.ess = ess(w);
    row.log_evidence = log_z0 + cloud.log_evidence_offset();
    const Vector g = estimate_gradient(cloud, model, state.theta);
    row.grad_norm = g.norm();
    row.resampled = resampled_into_state;
    trajectory.rows.push_back(std::move(row));
    return g;
  };

  long k = 0;
  for (; k < config.n_iterations; ++k) {
    Vector w;
    try {
      w = normalized_weights(cloud.log_weights);
    } catch (const std::runtime_error& e) {
      throw RunError(e.what(), k);
    }

    const Vector g_raw = record_row(k, w);
    const Vector g = shape_gradient(g_raw, config);

    state = optimizer_step(std::move(state), g, config.optimizer);
    state.theta = model.clip_theta(std::move(state.theta));
    if (!all_finite(state.theta)) {
      throw RunError("parameter update diverged", k);
    }

    // Particle sweep: drift and forward alpha at theta_k, backward alpha at
    // theta_{k+1}. The backward evaluations seed the next drift.
    for (Index i = 0; i < n; ++i) {
      const auto& at_old = cache[static_cast<std::size_t>(i)];
      RngStream particle_rng(stream_key(config.seed, rng_tag::kSweep,
                                        static_cast<std::uint64_t>(k),
                                        static_cast<std::uint64_t>(i)));
      const Vector x_old = cloud.positions.row(i).transpose();
      const Vector x_new =
          ula_step(x_old, at_old.grad, h, particle_rng.normal_vector(d));
      const double a_fwd = alpha_from_eval(at_old.value, at_old.grad, x_old, x_new, h);
      const auto at_new = model.potential_and_grad_x(state.theta, x_new);
      const double a_bwd = alpha_from_eval(at_new.value, at_new.grad, x_new, x_old, h);
      const double log_w_new = cloud.log_weights[i] - a_bwd + a_fwd;
      if (!all_finite(x_new) || !std::isfinite(log_w_new)) {
        throw RunError("particle diverged (reduce h)", k);
      }
      cloud.positions.row(i) = x_new.transpose();
      cloud.log_weights[i] = log_w_new;
      cache[static_cast<std::size_t>(i)] = at_new;
    }

    // Resampling decision on the weights that open iteration k + 1.
    resampled_into_state = false;
    Vector w_next;
    try {
      w_next = normalized_weights(cloud.log_weights);
    } catch (const std::runtime_error& e) {
      throw RunError(e.what(), k);
    }
    if (config.ess_threshold_fraction > 0.0 &&
        ess(w_next) / static_cast<double>(n) < config.ess_threshold_fraction) {
      RngStream resample_rng(stream_key(config.seed, rng_tag::kResample,
                                        static_cast<std::uint64_t>(k)));
      std::vector<Index> ancestors;
      cloud = resample_cloud(cloud, resample_rng, &ancestors);
      std::vector<PotentialGrad> gathered(cache.size());
      for (Index j = 0; j < n; ++j) {
        gathered[static_cast<std::size_t>(j)] =
            cache[static_cast<std::size_t>(ancestors[static_cast<std::size_t>(j)])];
      }
      cache = std::move(gathered);
      w_next = normalized_weights(cloud.log_weights);
      resampled_into_state = true;
    }

    if (on_iteration &&
        on_iteration(k, state.theta, cloud.positions, w_next) == StepControl::Stop) {
      ++k;
      break;
    }
  }

  const Vector w_final = normalized_weights(cloud.log_weights);
  record_row(k, w_final);

  FitResult result;
  result.theta_final = state.theta;
  result.weights_final = w_final;
  result.positions_final = cloud.positions;
  result.log_evidence_final = log_z0 + cloud.log_evidence_offset();
  result.trajectory = std::move(trajectory);
  result.trajectory.final_positions = result.positions_final;
  result.trajectory.final_weights = result.weights_final;
  result.cloud_final = std::move(cloud);
  return result;
}

std::vector<MseProbePoint> mse_scaling_probe(
    const LatentModel& model, const Vector& theta_fixed,
    const std::function<Vector(const Vector&)>& marginal_grad,
    const std::vector<long>& particle_counts, long trials, std::uint64_t seed) {
  constexpr long kSweepSteps = 20;
  constexpr double kStep = 0.1;

  const Vector exact = marginal_grad(theta_fixed);
  std::vector<MseProbePoint> points;
  points.reserve(particle_counts.size());

  for (const long n : particle_counts) {
    double total_sq_err = 0.0;
    for (long trial = 0; trial < trials; ++trial) {
      // Every trial owns a key derived from (seed, N, trial) so results do
      // not depend on the position of N in the list.
      const std::uint64_t trial_seed =
          stream_key(seed, rng_tag::kProbe, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(trial));
      RngStream init_rng(stream_key(trial_seed, rng_tag::kInit));
      ParticleCloud cloud = ParticleCloud::from_positions(
          model.init_particles(theta_fixed, n, init_rng));
      for (long k = 0; k < kSweepSteps; ++k) {
        for (Index i = 0; i < n; ++i) {
          RngStream rng(stream_key(trial_seed, rng_tag::kSweep,
                                   static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(i)));
          const auto rec =
              kernel_step(model, theta_fixed, cloud.positions.row(i).transpose(),
                          cloud.log_weights[i], kStep, rng);
          cloud.positions.row(i) = rec.new_position.transpose();
          cloud.log_weights[i] = rec.new_log_weight;
        }
      }
      const Vector g = estimate_gradient(cloud, model, theta_fixed);
      total_sq_err += (g - exact).squaredNorm();
    }
    points.push_back({n, total_sq_err / static_cast<double>(trials)});
  }
  return points;
}

double mse_loglog_slope(const std::vector<MseProbePoint>& points) {
  const auto m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double x = std::log(static_cast<double>(p.n_particles));
    const double y = std::log(p.mse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace jarzmle
