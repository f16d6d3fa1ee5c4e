#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jarzmle/baselines.hpp"
#include "jarzmle/engine.hpp"
#include "jarzmle/jarzynski.hpp"
#include "jarzmle/models/conjugate_gaussian.hpp"

using namespace jarzmle;

namespace {

Vector scalar(double v) {
  Vector x(1);
  x << v;
  return x;
}

BaselineConfig oracle_baseline(BaselineConfig::Kind kind, std::uint64_t seed) {
  BaselineConfig config;
  config.kind = kind;
  config.gamma = 0.1;
  config.soul_theta_gamma = 0.1;
  config.n_particles = 100;
  config.n_iterations = 500;
  config.seed = seed;
  config.theta_init = Vector::Zero(1);
  return config;
}

}  // namespace

TEST_CASE("deterministic update pieces") {
  CHECK(pgd_theta_update(scalar(1.0), scalar(0.0), 0.3)[0] == 1.0);
  CHECK(pgd_theta_update(scalar(0.0), scalar(-2.0), 0.1)[0] ==
        doctest::Approx(0.2));  // theta - gamma * grad
  CHECK(ipla_theta_update(scalar(0.0), scalar(0.0), 0.5, 2, scalar(1.0))[0] ==
        doctest::Approx(std::sqrt(0.5)));
  // zero gradient, zero noise: fixed points of both updates
  CHECK(ipla_theta_update(scalar(0.7), scalar(0.0), 0.5, 4, scalar(0.0))[0] == 0.7);
  CHECK(ula_step(scalar(0.7), scalar(0.0), 0.5, scalar(0.0))[0] == 0.7);
}

TEST_CASE("pgd single-particle parameter step on the oracle") {
  const ConjugateGaussianModel model(2.0);
  Matrix particles(1, 1);
  particles << 2.0;
  const SweepRng rng{0, 0};
  // grad_theta = theta - x = -2, so theta' = 0 - 0.1 * (-2) = 0.2
  const auto [theta_next, particles_next] =
      pgd_step(Vector::Zero(1), particles, model, 0.1, rng);
  CHECK(theta_next[0] == doctest::Approx(0.2));
  CHECK(particles_next.rows() == 1);
}

TEST_CASE("oracle convergence of every comparator") {
  const ConjugateGaussianModel model(2.0);

  SUBCASE("pgd") {
    const auto result = run_baseline(model, oracle_baseline(BaselineConfig::Kind::Pgd, 5));
    CHECK(std::abs(result.theta_final[0] - 2.0) < 0.15);
    CHECK(result.trajectory.rows.size() == 501);
    CHECK(std::isnan(result.trajectory.rows.back().log_evidence));
  }
  SUBCASE("ipla") {
    const auto result = run_baseline(model, oracle_baseline(BaselineConfig::Kind::Ipla, 6));
    CHECK(std::abs(result.theta_final[0] - 2.0) < 0.15);
  }
  SUBCASE("soul") {
    auto config = oracle_baseline(BaselineConfig::Kind::Soul, 7);
    config.gamma = 0.1;              // chain step
    config.soul_theta_gamma = 0.1;   // parameter step
    config.n_particles = 100;        // inner steps
    const auto result = run_baseline(model, config);
    CHECK(std::abs(result.theta_final[0] - 2.0) < 0.15);
    CHECK(result.ensemble.rows() == 100);  // last inner chain
  }
  SUBCASE("sfla") {
    auto config = oracle_baseline(BaselineConfig::Kind::Sfla, 8);
    config.gamma = 0.05;
    config.sfla_beta = 1e3;
    config.sfla_epsilon = 0.1;
    config.n_iterations = 2000;
    const auto result = run_baseline(model, config);
    CHECK(std::abs(result.theta_final[0] - 2.0) < 0.2);
  }
}

TEST_CASE("ipla with suppressed noise is exactly pgd") {
  RngStream rng(stream_key(77, 0x1b));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector theta = rng.normal_vector(3);
    const Vector g = rng.normal_vector(3);
    const double gamma = 0.01 + rng.uniform();
    const Index n = 1 + static_cast<Index>(rng.uniform() * 10);
    CHECK(ipla_theta_update(theta, g, gamma, n, Vector::Zero(3)) ==
          pgd_theta_update(theta, g, gamma));
  }
}

TEST_CASE("ipla approaches pgd as the particle count grows, shared seeds") {
  const ConjugateGaussianModel model(2.0);
  auto pgd_config = oracle_baseline(BaselineConfig::Kind::Pgd, 11);
  pgd_config.n_particles = 10000;
  pgd_config.n_iterations = 100;
  auto ipla_config = pgd_config;
  ipla_config.kind = BaselineConfig::Kind::Ipla;

  const auto pgd_result = run_baseline(model, pgd_config);
  const auto ipla_result = run_baseline(model, ipla_config);
  double worst = 0.0;
  for (std::size_t k = 0; k < pgd_result.trajectory.rows.size(); ++k) {
    worst = std::max(worst, std::abs(pgd_result.trajectory.rows[k].theta[0] -
                                     ipla_result.trajectory.rows[k].theta[0]));
  }
  INFO("max |theta_pgd - theta_ipla| ", worst);
  CHECK(worst < 0.05);
}

TEST_CASE("sfla with infinite temperature and unit scale replays single-particle pgd") {
  const ConjugateGaussianModel model(2.0);
  auto pgd_config = oracle_baseline(BaselineConfig::Kind::Pgd, 13);
  pgd_config.n_particles = 1;
  pgd_config.n_iterations = 50;
  auto sfla_config = pgd_config;
  sfla_config.kind = BaselineConfig::Kind::Sfla;
  sfla_config.sfla_beta = std::numeric_limits<double>::infinity();
  sfla_config.sfla_epsilon = 1.0;

  const auto pgd_result = run_baseline(model, pgd_config);
  const auto sfla_result = run_baseline(model, sfla_config);
  for (std::size_t k = 0; k < pgd_result.trajectory.rows.size(); ++k) {
    CHECK(pgd_result.trajectory.rows[k].theta[0] ==
          doctest::Approx(sfla_result.trajectory.rows[k].theta[0]).epsilon(1e-14));
  }
}

TEST_CASE("sfla step formula with replayed noise") {
  const ConjugateGaussianModel model(2.0);
  const SweepRng rng{99, 17};
  const double gamma = 0.1, beta = 1e3, epsilon = 0.5;
  const auto [theta_next, x_next] =
      sfla_step(scalar(0.0), scalar(2.0), model, gamma, beta, epsilon, rng);

  RngStream theta_stream = rng.scalar(rng_tag::kThetaNoise);
  const double xi = theta_stream.normal();
  RngStream x_stream = rng.particle(0);
  const double z = x_stream.normal();
  const double expected_theta =
      0.0 - gamma * (0.0 - 2.0) + std::sqrt(2.0 * gamma / beta) * xi;
  const double grad_x = (2.0 - 0.0) + (2.0 - 2.0);
  const double expected_x =
      2.0 - (gamma / epsilon) * grad_x + std::sqrt(2.0 * gamma / epsilon) * z;
  CHECK(theta_next[0] == doctest::Approx(expected_theta).epsilon(1e-15));
  CHECK(x_next[0] == doctest::Approx(expected_x).epsilon(1e-15));
}

TEST_CASE("soul structure") {
  const ConjugateGaussianModel model(2.0);

  SUBCASE("one inner step reduces to a single-particle move") {
    const SweepRng rng{21, 3};
    const auto result = soul_step(scalar(0.0), scalar(1.0), model, 0.05, 0.1, 1, rng);
    CHECK(result.inner_states.rows() == 1);
    CHECK(result.chain_state[0] == result.inner_states(0, 0));
    CHECK(result.grad_estimate[0] ==
          doctest::Approx(model.grad_theta(scalar(0.0), result.chain_state)[0]));
    CHECK(result.theta[0] ==
          doctest::Approx(0.0 - 0.05 * result.grad_estimate[0]));
  }

  SUBCASE("frozen-parameter inner chain time-averages to the posterior mean") {
    const SweepRng rng{22, 0};
    const auto result = soul_step(scalar(0.0), scalar(1.0), model,
                                  /*gamma_theta=*/0.0, /*gamma_x=*/0.05,
                                  /*n_inner=*/20000, rng);
    const double avg = result.inner_states.col(0).mean();
    // posterior mean (theta + y)/2 = 1; generous band for chain correlation
    CHECK(std::abs(avg - 1.0) < 0.1);
    CHECK(result.theta[0] == 0.0);
  }
}

TEST_CASE("baselines and the weighted engine agree on the oracle maximizer") {
  const ConjugateGaussianModel model(2.0);
  const int seeds = 15;
  double mean_jala = 0.0, mean_pgd = 0.0, mean_ipla = 0.0, mean_sfla = 0.0,
         mean_soul = 0.0;
  for (int s = 0; s < seeds; ++s) {
    RunConfig jala;
    jala.n_particles = 100;
    jala.n_iterations = 500;
    jala.langevin_step = 0.1;
    jala.optimizer = OptimizerSpec::sgd(0.1);
    jala.ess_threshold_fraction = 1.0 / 1.05;
    jala.seed = 3000 + static_cast<std::uint64_t>(s);
    jala.theta_init = Vector::Zero(1);
    mean_jala += run_jala_em(model, jala).theta_final[0] / seeds;

    mean_pgd += run_baseline(model, oracle_baseline(BaselineConfig::Kind::Pgd,
                                                    4000 + s))
                    .theta_final[0] /
                seeds;
    mean_ipla += run_baseline(model, oracle_baseline(BaselineConfig::Kind::Ipla,
                                                     5000 + s))
                     .theta_final[0] /
                 seeds;
    auto sfla = oracle_baseline(BaselineConfig::Kind::Sfla, 6000 + s);
    sfla.gamma = 0.05;
    sfla.sfla_beta = 1e3;
    sfla.sfla_epsilon = 0.1;
    sfla.n_iterations = 2000;
    mean_sfla += run_baseline(model, sfla).theta_final[0] / seeds;

    auto soul = oracle_baseline(BaselineConfig::Kind::Soul, 7000 + s);
    mean_soul += run_baseline(model, soul).theta_final[0] / seeds;
  }
  INFO("means ", mean_jala, " ", mean_pgd, " ", mean_ipla, " ", mean_sfla, " ",
       mean_soul);
  for (const double m : {mean_pgd, mean_ipla, mean_sfla, mean_soul}) {
    CHECK(std::abs(m - mean_jala) < 0.2);
  }
}

TEST_CASE("baseline divergence reports the iteration") {
  const ConjugateGaussianModel model(2.0);
  auto config = oracle_baseline(BaselineConfig::Kind::Pgd, 31);
  config.gamma = 1e9;
  CHECK_THROWS_AS(run_baseline(model, config), RunError);
}
