#include "jarzmle/baselines.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "jarzmle/jarzynski.hpp"
#include "jarzmle/numerics.hpp"

namespace jarzmle {

void BaselineConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (n_iterations < 0) throw std::invalid_argument("n_iterations must be >= 0");
  if (theta_init.size() == 0) throw std::invalid_argument("theta_init is empty");
  if (kind == Kind::Sfla && (!(sfla_beta > 0.0) || !(sfla_epsilon > 0.0))) {
    throw std::invalid_argument("SFLA needs beta > 0 and epsilon > 0");
  }
  if (kind == Kind::Soul && !(soul_theta_gamma > 0.0)) {
    throw std::invalid_argument("SOUL theta step must be > 0");
  }
}

Vector pgd_theta_update(const Vector& theta, const Vector& mean_grad_theta,
                        double gamma) {
  return theta - gamma * mean_grad_theta;
}

Vector ipla_theta_update(const Vector& theta, const Vector& mean_grad_theta,
                         double gamma, Index n, const Vector& xi) {
  return theta - gamma * mean_grad_theta +
         std::sqrt(2.0 * gamma / static_cast<double>(n)) * xi;
}

namespace {

Vector mean_grad_theta(const Vector& theta, const Matrix& particles,
                       const LatentModel& model) {
  Vector g = Vector::Zero(model.dim_theta());
  for (Index i = 0; i < particles.rows(); ++i) {
    g += model.grad_theta(theta, particles.row(i).transpose());
  }
  return g / static_cast<double>(particles.rows());
}

Matrix sweep_particles(const Vector& theta, const Matrix& particles,
                       const LatentModel& model, double gamma,
                       const SweepRng& rng) {
  Matrix next(particles.rows(), particles.cols());
  for (Index i = 0; i < particles.rows(); ++i) {
    const Vector x = particles.row(i).transpose();
    RngStream stream = rng.particle(i);
    next.row(i) =
        ula_step(x, model.grad_x(theta, x), gamma,
                 stream.normal_vector(particles.cols()))
            .transpose();
  }
  return next;
}

}  // namespace

std::pair<Vector, Matrix> pgd_step(const Vector& theta, const Matrix& particles,
                                   const LatentModel& model, double gamma,
                                   const SweepRng& rng) {
  const Vector g = mean_grad_theta(theta, particles, model);
  // the particle sweep sees the pre-update theta
  return {pgd_theta_update(theta, g, gamma),
          sweep_particles(theta, particles, model, gamma, rng)};
}

std::pair<Vector, Matrix> ipla_step(const Vector& theta,
                                    const Matrix& particles,
                                    const LatentModel& model, double gamma,
                                    const SweepRng& rng) {
  const Vector g = mean_grad_theta(theta, particles, model);
  RngStream theta_stream = rng.scalar(rng_tag::kThetaNoise);
  const Vector xi = theta_stream.normal_vector(theta.size());
  return {ipla_theta_update(theta, g, gamma, particles.rows(), xi),
          sweep_particles(theta, particles, model, gamma, rng)};
}

std::pair<Vector, Vector> sfla_step(const Vector& theta, const Vector& x,
                                    const LatentModel& model, double gamma,
                                    double beta, double epsilon,
                                    const SweepRng& rng) {
  RngStream theta_stream = rng.scalar(rng_tag::kThetaNoise);
  const Vector xi = theta_stream.normal_vector(theta.size());
  const double theta_noise_scale =
      std::isinf(beta) ? 0.0 : std::sqrt(2.0 * gamma / beta);
  const Vector theta_next =
      theta - gamma * model.grad_theta(theta, x) + theta_noise_scale * xi;
  RngStream x_stream = rng.particle(0);
  const Vector x_next = ula_step(x, model.grad_x(theta, x), gamma / epsilon,
                                 x_stream.normal_vector(x.size()));
  return {theta_next, x_next};
}

SoulStepResult soul_step(const Vector& theta, const Vector& chain_state,
                         const LatentModel& model, double gamma_theta,
                         double gamma_x, long n_inner, const SweepRng& rng) {
  if (n_inner < 1) throw std::invalid_argument("n_inner must be >= 1");
  SoulStepResult result;
  result.inner_states.resize(n_inner, chain_state.size());
  Vector x = chain_state;
  Vector grad_sum = Vector::Zero(model.dim_theta());
  for (long j = 0; j < n_inner; ++j) {
    RngStream stream = rng.particle(j);
    x = ula_step(x, model.grad_x(theta, x), gamma_x,
                 stream.normal_vector(x.size()));
    result.inner_states.row(j) = x.transpose();
    grad_sum += model.grad_theta(theta, x);
  }
  result.grad_estimate = grad_sum / static_cast<double>(n_inner);
  result.theta = theta - gamma_theta * result.grad_estimate;
  result.chain_state = std::move(x);
  return result;
}

BaselineResult run_baseline(const LatentModel& model,
                            const BaselineConfig& config,
                            const StepCallback& on_iteration) {
  config.validate();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Vector theta = config.theta_init;
  RngStream init_rng(stream_key(config.seed, rng_tag::kInit));

  Matrix ensemble;
  Vector chain;  // SFLA/SOUL single chain
  const bool single_chain =
      config.kind == BaselineConfig::Kind::Sfla ||
      config.kind == BaselineConfig::Kind::Soul;
  if (single_chain) {
    chain = model.init_particles(theta, 1, init_rng).row(0).transpose();
    ensemble = chain.transpose();
  } else {
    ensemble = model.init_particles(theta, config.n_particles, init_rng);
  }

  Trajectory trajectory;
  trajectory.rows.reserve(static_cast<std::size_t>(config.n_iterations) + 1);
  const auto record = [&](long k) {
    TrajectoryRow row;
    row.k = k;
    row.theta = theta;
    row.ess = static_cast<double>(ensemble.rows());  // equally weighted
    row.log_evidence = nan;
    Vector g = Vector::Zero(model.dim_theta());
    for (Index i = 0; i < ensemble.rows(); ++i) {
      g += model.grad_theta(theta, ensemble.row(i).transpose());
    }
    row.grad_norm = (g / static_cast<double>(ensemble.rows())).norm();
    row.resampled = false;
    trajectory.rows.push_back(std::move(row));
  };

  long k = 0;
  for (; k < config.n_iterations; ++k) {
    record(k);
    const SweepRng rng{config.seed, k};
    switch (config.kind) {
      case BaselineConfig::Kind::Pgd: {
        auto [theta_next, particles_next] =
            pgd_step(theta, ensemble, model, config.gamma, rng);
        theta = std::move(theta_next);
        ensemble = std::move(particles_next);
        break;
      }
      case BaselineConfig::Kind::Ipla: {
        auto [theta_next, particles_next] =
            ipla_step(theta, ensemble, model, config.gamma, rng);
        theta = std::move(theta_next);
        ensemble = std::move(particles_next);
        break;
      }
      case BaselineConfig::Kind::Sfla: {
        auto [theta_next, x_next] =
            sfla_step(theta, chain, model, config.gamma, config.sfla_beta,
                      config.sfla_epsilon, rng);
        theta = std::move(theta_next);
        chain = std::move(x_next);
        ensemble = chain.transpose();
        break;
      }
      case BaselineConfig::Kind::Soul: {
        auto result = soul_step(theta, chain, model, config.soul_theta_gamma,
                                config.gamma, config.n_particles, rng);
        theta = std::move(result.theta);
        chain = std::move(result.chain_state);
        ensemble = std::move(result.inner_states);
        break;
      }
    }
    if (!all_finite(theta) || !all_finite(ensemble)) {
      throw RunError("baseline diverged (reduce step-size)", k);
    }
    if (on_iteration) {
      const Vector uniform = Vector::Constant(
          ensemble.rows(), 1.0 / static_cast<double>(ensemble.rows()));
      if (on_iteration(k, theta, ensemble, uniform) == StepControl::Stop) {
        ++k;
        break;
      }
    }
  }
  record(k);

  BaselineResult result;
  result.theta_final = theta;
  result.ensemble = std::move(ensemble);
  result.trajectory = std::move(trajectory);
  result.trajectory.final_positions = result.ensemble;
  result.trajectory.final_weights = Vector::Constant(
      result.ensemble.rows(), 1.0 / static_cast<double>(result.ensemble.rows()));
  return result;
}

}  // namespace jarzmle
