#include "jarzmle/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace jarzmle {

OptimizerSpec OptimizerSpec::sgd(double gamma) {
  OptimizerSpec spec;
  spec.kind = Kind::Sgd;
  spec.gamma = gamma;
  return spec;
}

OptimizerSpec OptimizerSpec::adam(double gamma, double beta1, double beta2,
                                  double epsilon) {
  OptimizerSpec spec;
  spec.kind = Kind::Adam;
  spec.gamma = gamma;
  spec.beta1 = beta1;
  spec.beta2 = beta2;
  spec.epsilon = epsilon;
  return spec;
}

void OptimizerSpec::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (kind == Kind::Adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("Adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("Adam epsilon must be > 0");
  }
}

ThetaState ThetaState::init(Vector theta0, const OptimizerSpec& spec) {
  ThetaState state;
  if (spec.kind == OptimizerSpec::Kind::Adam) {
    state.adam_m = Vector::Zero(theta0.size());
    state.adam_v = Vector::Zero(theta0.size());
  }
  state.theta = std::move(theta0);
  return state;
}

Vector sgd_step(const Vector& theta, const Vector& g, double gamma) {
  return theta - gamma * g;
}

ThetaState adam_step(ThetaState state, const Vector& g,
                     const OptimizerSpec& spec) {
  state.adam_t += 1;
  state.adam_m = spec.beta1 * state.adam_m + (1.0 - spec.beta1) * g;
  state.adam_v =
      (spec.beta2 * state.adam_v.array() + (1.0 - spec.beta2) * g.array().square())
          .matrix();
  const double m_corr = 1.0 - std::pow(spec.beta1, state.adam_t);
  const double v_corr = 1.0 - std::pow(spec.beta2, state.adam_t);
  const Eigen::ArrayXd m_hat = state.adam_m.array() / m_corr;
  const Eigen::ArrayXd v_hat = state.adam_v.array() / v_corr;
  state.theta.array() -= spec.gamma * m_hat / (v_hat.sqrt() + spec.epsilon);
  return state;
}

ThetaState optimizer_step(ThetaState state, const Vector& g,
                          const OptimizerSpec& spec) {
  if (spec.kind == OptimizerSpec::Kind::Sgd) {
    state.theta = sgd_step(state.theta, g, spec.gamma);
  } else {
    state = adam_step(std::move(state), g, spec);
  }
  state.iteration += 1;
  return state;
}

LinearOperator hessian_bound_blr(const Matrix& x, double sigma0_sq) {
  if (!(sigma0_sq > 0.0)) throw std::invalid_argument("sigma0_sq must be > 0");
  LinearOperator op;
  op.dim = x.cols();
  op.apply = [x, sigma0_sq](const Vector& v) -> Vector {
    return 0.25 * (x.transpose() * (x * v)) + v / sigma0_sq;
  };
  return op;
}

PowerIterationResult power_iteration(const LinearOperator& op, long max_iters,
                                     double tol, RngStream& rng) {
  Vector v;
  for (int attempt = 0;; ++attempt) {
    v = rng.normal_vector(op.dim);
    const double norm = v.norm();
    if (norm > 0.0) {
      v /= norm;
      break;
    }
    if (attempt >= 2) throw std::runtime_error("power iteration: zero start vector");
  }

  PowerIterationResult result;
  double rayleigh = v.dot(op.apply(v));
  for (long it = 0; it < max_iters; ++it) {
    Vector av = op.apply(v);
    const double norm = av.norm();
    if (norm == 0.0) {
      // operator annihilated the iterate; dominant eigenvalue is 0
      result.eigenvalue = 0.0;
      result.converged = true;
      result.iterations = it + 1;
      return result;
    }
    v = av / norm;
    const double next = v.dot(op.apply(v));
    result.iterations = it + 1;
    if (std::abs(next - rayleigh) < tol) {
      result.eigenvalue = next;
      result.converged = true;
      return result;
    }
    rayleigh = next;
  }
  result.eigenvalue = rayleigh;
  result.converged = false;
  return result;
}

double h_euler(double lambda_max) {
  if (!(lambda_max > 0.0)) {
    throw std::invalid_argument("h_euler requires lambda_max > 0");
  }
  return 0.99 / lambda_max;
}

}  // namespace jarzmle
