#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "jarzmle/optim.hpp"
#include "jarzmle/rng.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

struct PotentialGrad {
  double value = 0.0;
  Vector grad;
};

// Joint potential U(theta, x) = -log p_theta(x, y) with analytic gradients
// in both arguments, one instance per statistical model. Instances are
// immutable after construction; evaluation methods are const and safe to
// call concurrently.
class LatentModel {
 public:
  virtual ~LatentModel() = default;

  virtual Index dim_x() const = 0;
  virtual Index dim_theta() const = 0;

  virtual double potential(const Vector& theta, const Vector& x) const = 0;
  virtual Vector grad_x(const Vector& theta, const Vector& x) const = 0;
  virtual Vector grad_theta(const Vector& theta, const Vector& x) const = 0;

  // Model-owned initialization scheme (prior draws, exact posterior draws,
  // warm-started chains, ...). Returns an n x dim_x matrix.
  virtual Matrix init_particles(const Vector& theta0, Index n,
                                RngStream& rng) const = 0;

  // Fused value + x-gradient; override when the two share work.
  virtual PotentialGrad potential_and_grad_x(const Vector& theta,
                                             const Vector& x) const {
    return {potential(theta, x), grad_x(theta, x)};
  }

  // Parameter constraint applied after every optimizer step. Identity for
  // unconstrained models.
  virtual Vector clip_theta(Vector theta) const { return theta; }
};

struct GradientCheckReport {
  double max_rel_err_x = 0.0;
  double max_rel_err_theta = 0.0;
};

// Compares analytic gradients against central finite differences of the
// potential, component-wise. Throws if the potential is not finite at a
// probe point.
GradientCheckReport check_gradients(const LatentModel& model,
                                    const Vector& theta, const Vector& x,
                                    double fd_step);

// N particle positions plus unnormalized log-weights and the evidence
// segments accumulated at resampling events. Weights are all zero right
// after initialization and right after a resample.
struct ParticleCloud {
  Matrix positions;    // N x dim_x
  Vector log_weights;  // length N
  std::vector<double> evidence_segments;

  Index particle_count() const { return positions.rows(); }

  static ParticleCloud from_positions(Matrix pos);

  // sum of segments + log((1/N) sum_i exp(A_i)); the full estimate is
  // log_z0 plus this.
  double log_evidence_offset() const;

  void write_csv(std::ostream& out) const;
  static ParticleCloud read_csv(std::istream& in);
};

struct RunConfig {
  Index n_particles = 100;
  long n_iterations = 100;
  double langevin_step = 0.1;
  OptimizerSpec optimizer;
  // Resample when ESS / N drops below this fraction; 0 disables.
  double ess_threshold_fraction = 0.0;
  std::uint64_t seed = 0;
  Vector theta_init;
  // Applied to the estimated gradient before the optimizer: hard norm cap,
  // then optional normalization to unit norm.
  double gradient_clip_norm = 1e4;
  bool normalize_gradient = false;

  void validate() const;  // throws std::invalid_argument
};

struct TrajectoryRow {
  long k = 0;
  Vector theta;
  double ess = 0.0;
  double log_evidence = 0.0;  // NaN when the algorithm does not track it
  double grad_norm = 0.0;
  bool resampled = false;  // a resampling event produced this state
};

// Per-iteration record, rows 0..K inclusive, plus the terminal particle
// dump.
struct Trajectory {
  std::vector<TrajectoryRow> rows;
  Matrix final_positions;
  Vector final_weights;

  void write_csv(std::ostream& out,
                 const std::vector<std::string>& header_comments = {}) const;
};

// Abort signal from inside a run; carries the offending iteration.
class RunError : public std::runtime_error {
 public:
  struct Preformatted {};

  RunError(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                           ")"),
        iteration_(iteration) {}
  RunError(Preformatted, const std::string& what, long iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace jarzmle
