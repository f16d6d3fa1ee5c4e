#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jarzmle/engine.hpp"
#include "jarzmle/jarzynski.hpp"
#include "jarzmle/models/conjugate_gaussian.hpp"
#include "support/checks.hpp"

using namespace jarzmle;

namespace {

RunConfig oracle_config() {
  RunConfig config;
  config.n_particles = 100;
  config.n_iterations = 500;
  config.langevin_step = 0.1;
  config.optimizer = OptimizerSpec::sgd(0.1);
  config.ess_threshold_fraction = 1.0 / 1.05;
  config.seed = 1234;
  config.theta_init = Vector::Zero(1);
  return config;
}

}  // namespace

TEST_CASE("estimate_gradient on tiny clouds") {
  const ConjugateGaussianModel model(2.0);

  SUBCASE("a single particle returns its own gradient") {
    ParticleCloud cloud;
    cloud.positions = Matrix::Constant(1, 1, 3.0);
    cloud.log_weights = Vector::Zero(1);
    Vector theta(1);
    theta << 1.0;
    CHECK(estimate_gradient(cloud, model, theta)[0] == doctest::Approx(-2.0));
  }

  SUBCASE("uniform weights average the per-particle gradients") {
    ParticleCloud cloud;
    cloud.positions.resize(3, 1);
    cloud.positions << 1.0, 2.0, 4.0;
    cloud.log_weights = Vector::Constant(3, 5.0);  // equal, nonzero
    Vector theta(1);
    theta << 0.5;
    // grad_theta = theta - x, averaged
    CHECK(estimate_gradient(cloud, model, theta)[0] ==
          doctest::Approx(0.5 - 7.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("estimate_gradient realizes the marginal gradient on posterior draws") {
  const ConjugateGaussianModel model(2.0);
  const Index n = 100000;
  RngStream rng(stream_key(77, rng_tag::kInit));
  ParticleCloud cloud =
      ParticleCloud::from_positions(model.init_particles(Vector::Zero(1), n, rng));
  const Vector g = estimate_gradient(cloud, model, Vector::Zero(1));
  // grad V(0) = (0 - y) / 2 = -1, MC band 3 * sqrt(var / n) with var = 1/2
  CHECK(std::abs(g[0] - (-1.0)) < 3.0 * std::sqrt(0.5 / static_cast<double>(n)));
}

TEST_CASE("gradient shift invariance at the cloud level") {
  const ConjugateGaussianModel model(2.0);
  RngStream rng(stream_key(88, rng_tag::kInit));
  ParticleCloud cloud =
      ParticleCloud::from_positions(model.init_particles(Vector::Zero(1), 64, rng));
  RngStream noise(stream_key(88, 0x11));
  cloud.log_weights = noise.normal_vector(64);

  ParticleCloud shifted = cloud;
  shifted.log_weights.array() += 123.456;

  const Vector g = estimate_gradient(cloud, model, Vector::Zero(1));
  const Vector g_shifted = estimate_gradient(shifted, model, Vector::Zero(1));
  CHECK(std::abs(g[0] - g_shifted[0]) < 1e-12);
  CHECK(std::abs(ess(normalized_weights(cloud.log_weights)) -
                 ess(normalized_weights(shifted.log_weights))) < 1e-9);
}

TEST_CASE("oracle fit converges to the marginal maximizer") {
  const ConjugateGaussianModel model(2.0);
  const FitResult fit = run_jala_em(model, oracle_config());
  CHECK(std::abs(fit.theta_final[0] - 2.0) < 0.1);
  CHECK(fit.trajectory.rows.size() == 501);
  for (std::size_t k = 0; k < fit.trajectory.rows.size(); ++k) {
    CHECK(fit.trajectory.rows[k].k == static_cast<long>(k));
  }
  CHECK(std::abs(fit.weights_final.sum() - 1.0) < 1e-12);
}

TEST_CASE("zero iterations leave everything at the start") {
  const ConjugateGaussianModel model(2.0);
  RunConfig config = oracle_config();
  config.n_iterations = 0;
  const FitResult fit = run_jala_em(model, config, -1.5);
  CHECK(fit.theta_final[0] == 0.0);
  CHECK(fit.log_evidence_final == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(fit.trajectory.rows.size() == 1);
}

TEST_CASE("frozen-parameter run reproduces the analytic evidence") {
  const ConjugateGaussianModel model(2.0);
  RunConfig config = oracle_config();
  config.n_particles = 500;
  config.n_iterations = 200;
  config.optimizer = OptimizerSpec::sgd(0.0);
  config.seed = 4321;
  const double analytic = model.marginal_log_evidence(0.0);
  const FitResult fit = run_jala_em(model, config, analytic);
  CHECK(std::abs(fit.log_evidence_final - analytic) < 0.05);
  CHECK(analytic == doctest::Approx(-2.2655).epsilon(1e-4));
}

TEST_CASE("reruns are bit-identical") {
  const auto result = jarzmle::testing::check_engine_determinism();
  INFO(result.detail);
  CHECK(result.ok);
}

TEST_CASE("divergent step sizes abort with the iteration index") {
  const ConjugateGaussianModel model(2.0);
  RunConfig config = oracle_config();
  config.langevin_step = 1e8;
  config.n_iterations = 50;
  try {
    run_jala_em(model, config);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.iteration() >= 0);
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("early-stop callback truncates the run") {
  const ConjugateGaussianModel model(2.0);
  RunConfig config = oracle_config();
  config.n_iterations = 100;
  long calls = 0;
  const FitResult fit = run_jala_em(
      model, config, 0.0, [&](long k, const Vector&, const Matrix&, const Vector&) {
        ++calls;
        return k >= 9 ? StepControl::Stop : StepControl::Continue;
      });
  CHECK(calls == 10);
  CHECK(fit.trajectory.rows.size() == 11);  // states 0..10
}

TEST_CASE("mse probe: determinism and the single-draw definition") {
  const ConjugateGaussianModel model(2.0);
  const auto marginal = [&](const Vector& t) { return model.marginal_grad(t); };
  const Vector theta = Vector::Zero(1);

  const auto a = mse_scaling_probe(model, theta, marginal, {50}, 3, 99);
  const auto b = mse_scaling_probe(model, theta, marginal, {50}, 3, 99);
  REQUIRE(a.size() == 1);
  CHECK(a[0].mse == b[0].mse);

  const auto single = mse_scaling_probe(model, theta, marginal, {1}, 1, 99);
  CHECK(single[0].mse >= 0.0);
  CHECK(std::isfinite(single[0].mse));

  // white-box replay of the one-particle trial
  const std::uint64_t trial_seed = stream_key(99, rng_tag::kProbe, 1, 0);
  RngStream init(stream_key(trial_seed, rng_tag::kInit));
  ParticleCloud cloud =
      ParticleCloud::from_positions(model.init_particles(theta, 1, init));
  for (long k = 0; k < 20; ++k) {
    RngStream rng(stream_key(trial_seed, rng_tag::kSweep, k, 0));
    const auto rec = kernel_step(model, theta, cloud.positions.row(0).transpose(),
                                 cloud.log_weights[0], 0.1, rng);
    cloud.positions.row(0) = rec.new_position.transpose();
    cloud.log_weights[0] = rec.new_log_weight;
  }
  const Vector g = estimate_gradient(cloud, model, theta);
  CHECK(single[0].mse == doctest::Approx((g - marginal(theta)).squaredNorm())
                             .epsilon(1e-15));
}

TEST_CASE("mse probe scales roughly inversely with the particle count") {
  const ConjugateGaussianModel model(2.0);
  const auto points = mse_scaling_probe(
      model, Vector::Zero(1), [&](const Vector& t) { return model.marginal_grad(t); },
      {25, 100, 400}, 60, 7);
  const double slope = mse_loglog_slope(points);
  INFO("slope ", slope);
  CHECK(slope < -0.6);
  CHECK(slope > -1.4);
}
