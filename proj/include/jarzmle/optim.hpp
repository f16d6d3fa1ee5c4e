#pragma once

#include <functional>

#include "jarzmle/rng.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

struct OptimizerSpec {
  enum class Kind { Sgd, Adam };

  Kind kind = Kind::Sgd;
  double gamma = 0.1;
  // Adam moment decays and denominator guard; beta1 = 0.9 with the
  // optimizer's canonical defaults for the rest.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerSpec sgd(double gamma);
  static OptimizerSpec adam(double gamma, double beta1 = 0.9,
                            double beta2 = 0.999, double epsilon = 1e-8);
  void validate() const;  // throws std::invalid_argument
};

// Parameter vector plus the per-optimizer accumulator. For Adam the
// accumulator holds first/second moments and the step counter; SGD leaves
// it empty.
struct ThetaState {
  Vector theta;
  Vector adam_m;
  Vector adam_v;
  long adam_t = 0;
  long iteration = 0;

  static ThetaState init(Vector theta0, const OptimizerSpec& spec);
};

Vector sgd_step(const Vector& theta, const Vector& g, double gamma);

// Bias-corrected Adam update; returns the advanced state.
ThetaState adam_step(ThetaState state, const Vector& g,
                     const OptimizerSpec& spec);

// Dispatches on spec.kind and bumps the iteration counter.
ThetaState optimizer_step(ThetaState state, const Vector& g,
                          const OptimizerSpec& spec);

// Matrix-free symmetric PSD operator.
struct LinearOperator {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply;
};

// v -> (1/4) X^T (X v) + v / sigma0_sq, an upper bound (in the PSD order)
// on the logistic-regression Hessian in the weights.
LinearOperator hessian_bound_blr(const Matrix& x, double sigma0_sq);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Dominant eigenvalue of a symmetric PSD operator. Converged when two
// successive Rayleigh quotients differ by less than tol.
PowerIterationResult power_iteration(const LinearOperator& op, long max_iters,
                                     double tol, RngStream& rng);

// Euler-stable Langevin step bound: 0.99 / lambda_max.
double h_euler(double lambda_max);

}  // namespace jarzmle
