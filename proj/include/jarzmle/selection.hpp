#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "jarzmle/core.hpp"
#include "jarzmle/engine.hpp"
#include "jarzmle/models/linear_regression.hpp"
#include "jarzmle/rng.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

struct EvidenceReport {
  enum class Method { Analytic, ImportanceSampling, Jarzynski };

  double log_z0 = 0.0;
  std::vector<double> log_z_trajectory;
  double log_z_final = 0.0;
  Method method = Method::Jarzynski;
};

// Assembles the running-evidence view of a finished fit; log_z_final equals
// log_z0 + the accumulated segments + the live log-mean-exp term by
// construction.
EvidenceReport evidence_report_from_fit(double log_z0, const FitResult& fit);

// log N(y; 0, sigma_sq I + alpha^{-1} X X^T) through a Cholesky
// factorization of the d_y x d_y covariance.
double gaussian_evidence(const Matrix& x, const Vector& y, double sigma_sq,
                         double alpha);

// Posterior of the weights under the Gaussian likelihood:
// Sigma_q = (X^T X / sigma_sq + alpha I)^{-1}, mu_q = Sigma_q X^T y / sigma_sq.
std::pair<Vector, Matrix> gaussian_posterior(const Matrix& x, const Vector& y,
                                             double sigma_sq, double alpha);

// Importance-sampling evidence with a Gaussian-posterior proposal built at
// (sigma0_sq, alpha0). log_likelihood maps a weight draw to its data
// log-likelihood; the prior factor N(w | 0, alpha0^{-1} I) is applied here.
double importance_sampling_evidence(
    const std::function<double(const Vector&)>& log_likelihood,
    const Matrix& x, const Vector& y, double sigma0_sq, double alpha0, long s,
    RngStream& rng);

// The Student-t instantiation: likelihood at theta0's (sigma^2, nu),
// proposal from the Gaussian approximation at theta0's (sigma^2, alpha).
double is_evidence_student_t(const StudentTLinRegModel& model,
                             const Vector& theta0, long s, RngStream& rng);

// log Z_A - log Z_B; positive favors A.
double bayes_factor(double log_z_a, double log_z_b);

struct MlIiResult {
  double phi1 = 0.0;
  double phi2 = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Type-II maximum likelihood for the Gaussian regression evidence:
// finite-difference gradient descent with backtracking line search on
// -log Z(phi1, phi2).
MlIiResult ml_ii_fit(const Matrix& x, const Vector& y,
                     std::pair<double, double> init);

struct OlsFit {
  Vector w;
  double sigma_sq = 0.0;  // mean squared residual (divisor d_y)
};

// Exact least squares via column-pivoted QR; throws on rank deficiency.
OlsFit ols_fit(const Matrix& x, const Vector& y);

// (p + 2) log d_y - 2 log_lik: p + 1 weights plus the noise variance.
double bic(int p, Index d_y, double log_lik);

struct OrderCandidateReport {
  int order = 0;
  double log_z0 = 0.0;
  double log_z_final = 0.0;
  bool selected = false;
};

struct OrderSelectionResult {
  int selected_order = 0;
  std::vector<OrderCandidateReport> candidates;
};

// Fits every candidate polynomial order with the weighted-ULA engine and
// picks the order with the largest final evidence estimate; ties break
// toward the smaller order. config.theta_init supplies (phi1, phi2) and
// each candidate's log Z_0 is the analytic Gaussian evidence at that point.
OrderSelectionResult select_order_jala(const Vector& x_raw, const Vector& y,
                                       const std::vector<int>& orders,
                                       const RunConfig& config);

// Largest Langevin step the Euler dynamics tolerate on a Gaussian
// regression posterior: 0.99 over the top eigenvalue of
// X^T X / sigma_sq + alpha I. Feed it the stiffest candidate design when a
// whole candidate set shares one step. Deterministic.
double stable_langevin_step(const Matrix& design, double sigma_sq, double alpha);

}  // namespace jarzmle
