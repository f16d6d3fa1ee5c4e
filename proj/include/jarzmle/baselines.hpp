#pragma once

#include <utility>

#include "jarzmle/core.hpp"
#include "jarzmle/engine.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

// Comparator algorithms. PGD and IPLA evolve an equally-weighted particle
// system with a shared step-size for theta and the particles; SFLA runs a
// single latent chain on a faster time-scale; SOUL alternates an inner ULA
// chain with an outer gradient step.
struct BaselineConfig {
  enum class Kind { Pgd, Ipla, Sfla, Soul };

  Kind kind = Kind::Pgd;
  // Shared step for PGD/IPLA; theta step for SFLA; inner-chain step for SOUL.
  double gamma = 0.01;
  double soul_theta_gamma = 0.1;
  double sfla_beta = 1e3;
  double sfla_epsilon = 0.1;
  // Particle count for PGD/IPLA; inner steps per outer iteration for SOUL.
  Index n_particles = 100;
  long n_iterations = 100;
  std::uint64_t seed = 0;
  Vector theta_init;

  void validate() const;
};

// One PGD iteration: theta moves along the particle-averaged parameter
// gradient at the old theta, each particle takes a ULA step at the old
// theta. Both updates share gamma.
std::pair<Vector, Matrix> pgd_step(const Vector& theta, const Matrix& particles,
                                   const LatentModel& model, double gamma,
                                   const SweepRng& rng);

// PGD plus sqrt(2 gamma / N) noise on the theta update.
std::pair<Vector, Matrix> ipla_step(const Vector& theta,
                                    const Matrix& particles,
                                    const LatentModel& model, double gamma,
                                    const SweepRng& rng);

// Deterministic parts, exposed for noise-forced checks.
Vector pgd_theta_update(const Vector& theta, const Vector& mean_grad_theta,
                        double gamma);
Vector ipla_theta_update(const Vector& theta, const Vector& mean_grad_theta,
                         double gamma, Index n, const Vector& xi);

// One SFLA iteration on a single chain:
//   theta' = theta - gamma grad_theta U + sqrt(2 gamma / beta) xi
//   x'     = x - (gamma / eps) grad_x U + sqrt(2 gamma / eps) z
std::pair<Vector, Vector> sfla_step(const Vector& theta, const Vector& x,
                                    const LatentModel& model, double gamma,
                                    double beta, double epsilon,
                                    const SweepRng& rng);

struct SoulStepResult {
  Vector theta;
  Vector chain_state;
  Matrix inner_states;  // n_inner x dim_x, the states averaged over
  Vector grad_estimate;
};

// One SOUL outer iteration: n_inner ULA steps at frozen theta continuing
// the warm-started chain, parameter gradient averaged over all inner
// states, then one gradient step on theta.
SoulStepResult soul_step(const Vector& theta, const Vector& chain_state,
                         const LatentModel& model, double gamma_theta,
                         double gamma_x, long n_inner, const SweepRng& rng);

struct BaselineResult {
  Vector theta_final;
  // Posterior approximation the algorithm ends with: the particle ensemble
  // (PGD/IPLA), the last inner chain states (SOUL), or the single chain
  // state (SFLA).
  Matrix ensemble;
  Trajectory trajectory;  // log_evidence is NaN throughout
};

BaselineResult run_baseline(const LatentModel& model,
                            const BaselineConfig& config,
                            const StepCallback& on_iteration = {});

}  // namespace jarzmle
