#pragma once

#include <string>
#include <vector>

#include "jarzmle/classifier.hpp"
#include "jarzmle/core.hpp"
#include "jarzmle/types.hpp"

namespace jarzmle {

// Mean over data of log of the probability the weighted particle ensemble
// assigns to the true label. prob_floor guards the log for ensembles that
// can emit exact zeros (the network models clip at 1e-30).
double lppd(const Matrix& positions, const Vector& weights,
            const Matrix& features, const IntVector& labels,
            const Classifier& clf, double prob_floor = 0.0);

// Fraction misclassified by the argmax of the ensemble-averaged predictive
// distribution.
double test_error(const Matrix& positions, const Vector& weights,
                  const Matrix& features, const IntVector& labels,
                  const Classifier& clf);

// Mean |p_hat - p_star| over selections.
double order_mae(const std::vector<int>& selected, int truth);

// Step-size grid of the cross-validation protocol: particle steps spread
// around the curvature-derived h_euler, a short list of theta steps, and
// the early-stopping rule (validation checks every eval_interval
// iterations, stop after `patience` checks without an improvement of at
// least early_stop_eps).
struct TuneGrid {
  std::vector<double> particle_step_values;
  std::vector<double> theta_step_values{0.05, 0.1, 0.15};
  int folds = 3;
  long max_iters = 500;
  double early_stop_eps = 1e-5;
  int patience = 10;
  long eval_interval = 10;

  // 10 linearly spaced particle steps in [0.2, 2.0] * h_euler, with
  // h_euler derived from the logistic-regression Hessian bound on x.
  static TuneGrid for_blr(const Matrix& x, double sigma0_sq);

  void validate() const;
};

enum class TuneAlgorithm { JalaEm, Pgd, Soul };

struct TunePoint {
  double particle_step = 0.0;
  double theta_step = 0.0;
};

struct TuneRow {
  TunePoint point;
  int fold = 0;
  double lppd = 0.0;
  long stopped_at = 0;
  bool diverged = false;
};

struct TuneResult {
  TunePoint chosen;
  std::vector<TuneRow> rows;
  void write_csv(std::ostream& out,
                 const std::vector<std::string>& header_comments = {}) const;
};

// 3-fold cross-validated grid search on a binary classification dataset
// (logistic-regression posterior). Each fold-point run early-stops on
// validation LPPD; the chosen point maximizes the fold-mean LPPD of the
// terminal ensembles. PGD ties the theta step to the particle step; the
// other algorithms search the product grid. Throws if every grid point
// diverged, listing the failures.
TuneResult cv_tune(TuneAlgorithm algorithm, const Matrix& features,
                   const Vector& labels, double sigma0_sq,
                   const TuneGrid& grid, Index n_particles,
                   std::uint64_t seed);

}  // namespace jarzmle
