#include "jarzmle/evaluation.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jarzmle/baselines.hpp"
#include "jarzmle/csv.hpp"
#include "jarzmle/engine.hpp"
#include "jarzmle/models/logistic_regression.hpp"
#include "jarzmle/optim.hpp"

namespace jarzmle {

namespace {

Vector averaged_probabilities(const Matrix& positions, const Vector& weights,
                              const Vector& features, const Classifier& clf) {
  Vector avg = Vector::Zero(clf.n_classes());
  for (Index p = 0; p < positions.rows(); ++p) {
    avg += weights[p] *
           clf.class_probabilities(positions.row(p).transpose(), features);
  }
  return avg;
}

}  // namespace

double lppd(const Matrix& positions, const Vector& weights,
            const Matrix& features, const IntVector& labels,
            const Classifier& clf, double prob_floor) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("features/labels row mismatch");
  }
  if (features.rows() == 0) throw std::invalid_argument("empty dataset");
  // keep the log finite even when every particle underflows to zero
  const double floor = std::max(prob_floor, 1e-300);
  double total = 0.0;
  for (Index i = 0; i < features.rows(); ++i) {
    const Vector avg =
        averaged_probabilities(positions, weights, features.row(i).transpose(), clf);
    total += std::log(std::max(floor, avg[labels[i]]));
  }
  return total / static_cast<double>(features.rows());
}

double test_error(const Matrix& positions, const Vector& weights,
                  const Matrix& features, const IntVector& labels,
                  const Classifier& clf) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("features/labels row mismatch");
  }
  Index wrong = 0;
  for (Index i = 0; i < features.rows(); ++i) {
    const Vector avg =
        averaged_probabilities(positions, weights, features.row(i).transpose(), clf);
    Index argmax = 0;
    avg.maxCoeff(&argmax);
    if (argmax != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(features.rows());
}

double order_mae(const std::vector<int>& selected, int truth) {
  if (selected.empty()) throw std::invalid_argument("no selections");
  double total = 0.0;
  for (const int p : selected) total += std::abs(p - truth);
  return total / static_cast<double>(selected.size());
}

TuneGrid TuneGrid::for_blr(const Matrix& x, double sigma0_sq) {
  const LinearOperator bound = hessian_bound_blr(x, sigma0_sq);
  RngStream rng(stream_key(0, rng_tag::kTune, 0xe16));
  const auto top = power_iteration(bound, 1000, 1e-10, rng);
  const double base = h_euler(top.eigenvalue);

  TuneGrid grid;
  grid.particle_step_values.resize(10);
  for (int i = 0; i < 10; ++i) {
    const double f = 0.2 + (2.0 - 0.2) * static_cast<double>(i) / 9.0;
    grid.particle_step_values[static_cast<std::size_t>(i)] = f * base;
  }
  return grid;
}

void TuneGrid::validate() const {
  if (particle_step_values.empty() || theta_step_values.empty()) {
    throw std::invalid_argument("tuning grids must be non-empty");
  }
  for (const double v : particle_step_values) {
    if (!(v > 0.0)) throw std::invalid_argument("particle steps must be > 0");
  }
  for (const double v : theta_step_values) {
    if (!(v > 0.0)) throw std::invalid_argument("theta steps must be > 0");
  }
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
}

void TuneResult::write_csv(std::ostream& out,
                           const std::vector<std::string>& header_comments) const {
  for (const auto& comment : header_comments) out << "# " << comment << '\n';
  out << "particle_step,theta_step,fold,lppd,stopped_at_iteration,diverged\n";
  for (const auto& row : rows) {
    out << format_double(row.point.particle_step) << ','
        << format_double(row.point.theta_step) << ',' << row.fold << ',';
    if (std::isfinite(row.lppd)) out << format_double(row.lppd);
    out << ',' << row.stopped_at << ',' << (row.diverged ? '1' : '0') << '\n';
  }
}

namespace {

// label-stratified fold assignment: per class, shuffled then dealt
// round-robin
std::vector<int> fold_assignment(const Vector& labels, int folds,
                                 std::uint64_t seed) {
  std::map<double, std::vector<Index>> by_class;
  for (Index i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<int> fold_of(static_cast<std::size_t>(labels.size()), 0);
  RngStream rng(stream_key(seed, rng_tag::kTune, 1));
  for (auto& [label, indices] : by_class) {
    for (std::size_t i = indices.size(); i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
      std::swap(indices[i - 1], indices[std::min(j, i - 1)]);
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
      fold_of[static_cast<std::size_t>(indices[i])] = static_cast<int>(i) % folds;
    }
  }
  return fold_of;
}

struct FoldData {
  Matrix train_x;
  Vector train_y;
  Matrix val_x;
  IntVector val_y;
};

FoldData make_fold(const Matrix& x, const Vector& y,
                   const std::vector<int>& fold_of, int fold) {
  std::vector<Index> train, val;
  for (Index i = 0; i < y.size(); ++i) {
    (fold_of[static_cast<std::size_t>(i)] == fold ? val : train).push_back(i);
  }
  FoldData data;
  data.train_x.resize(static_cast<Index>(train.size()), x.cols());
  data.train_y.resize(static_cast<Index>(train.size()));
  for (Index i = 0; i < data.train_y.size(); ++i) {
    data.train_x.row(i) = x.row(train[static_cast<std::size_t>(i)]);
    data.train_y[i] = y[train[static_cast<std::size_t>(i)]];
  }
  data.val_x.resize(static_cast<Index>(val.size()), x.cols());
  data.val_y.resize(static_cast<Index>(val.size()));
  for (Index i = 0; i < data.val_y.size(); ++i) {
    data.val_x.row(i) = x.row(val[static_cast<std::size_t>(i)]);
    data.val_y[i] = static_cast<int>(y[val[static_cast<std::size_t>(i)]]);
  }
  return data;
}

struct EarlyStopState {
  double best = -std::numeric_limits<double>::infinity();
  int stale = 0;
  double last = -std::numeric_limits<double>::infinity();
  long stopped_at = 0;
};

}  // namespace

TuneResult cv_tune(TuneAlgorithm algorithm, const Matrix& features,
                   const Vector& labels, double sigma0_sq,
                   const TuneGrid& grid, Index n_particles,
                   std::uint64_t seed) {
  grid.validate();
  std::vector<TunePoint> points;
  if (algorithm == TuneAlgorithm::Pgd) {
    // one shared step-size
    for (const double h : grid.particle_step_values) points.push_back({h, h});
  } else {
    for (const double h : grid.particle_step_values) {
      for (const double g : grid.theta_step_values) points.push_back({h, g});
    }
  }

  const std::vector<int> fold_of = fold_assignment(labels, grid.folds, seed);

  TuneResult result;
  std::vector<double> mean_lppd(points.size(), 0.0);
  std::vector<bool> usable(points.size(), true);

  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const TunePoint& point = points[pi];
    for (int fold = 0; fold < grid.folds; ++fold) {
      const FoldData data = make_fold(features, labels, fold_of, fold);
      const BayesianLogisticModel model(data.train_x, data.train_y, sigma0_sq);
      const std::uint64_t run_seed =
          stream_key(seed, rng_tag::kTune, pi + 2, static_cast<std::uint64_t>(fold));

      TuneRow row;
      row.point = point;
      row.fold = fold;

      EarlyStopState stop;
      const StepCallback watch = [&](long k, const Vector&,
                                     const Matrix& positions,
                                     const Vector& weights) {
        if ((k + 1) % grid.eval_interval != 0) return StepControl::Continue;
        const double value =
            lppd(positions, weights, data.val_x, data.val_y, model);
        stop.last = value;
        stop.stopped_at = k + 1;
        if (value > stop.best + grid.early_stop_eps) {
          stop.best = value;
          stop.stale = 0;
        } else if (++stop.stale >= grid.patience) {
          return StepControl::Stop;
        }
        return StepControl::Continue;
      };

      try {
        Vector theta0 = Vector::Zero(1);
        if (algorithm == TuneAlgorithm::JalaEm) {
          RunConfig config;
          config.n_particles = n_particles;
          config.n_iterations = grid.max_iters;
          config.langevin_step = point.particle_step;
          config.optimizer = OptimizerSpec::sgd(point.theta_step);
          config.ess_threshold_fraction = 1.0 / 1.05;
          config.seed = run_seed;
          config.theta_init = theta0;
          const FitResult fit = run_jala_em(model, config, 0.0, watch);
          row.lppd = lppd(fit.positions_final, fit.weights_final, data.val_x,
                          data.val_y, model);
        } else {
          BaselineConfig config;
          config.kind = algorithm == TuneAlgorithm::Pgd
                            ? BaselineConfig::Kind::Pgd
                            : BaselineConfig::Kind::Soul;
          config.gamma = point.particle_step;
          config.soul_theta_gamma = point.theta_step;
          config.n_particles = n_particles;
          config.n_iterations = grid.max_iters;
          config.seed = run_seed;
          config.theta_init = theta0;
          const BaselineResult fit = run_baseline(model, config, watch);
          const Vector uniform = Vector::Constant(
              fit.ensemble.rows(), 1.0 / static_cast<double>(fit.ensemble.rows()));
          row.lppd = lppd(fit.ensemble, uniform, data.val_x, data.val_y, model);
        }
        row.stopped_at = stop.stopped_at;
      } catch (const RunError&) {
        row.diverged = true;
        row.lppd = -std::numeric_limits<double>::infinity();
        usable[pi] = false;
      }
      mean_lppd[pi] += row.lppd / grid.folds;
      result.rows.push_back(row);
    }
  }

  std::size_t best = points.size();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    if (!usable[pi]) continue;
    if (best == points.size() || mean_lppd[pi] > mean_lppd[best]) best = pi;
  }
  if (best == points.size()) {
    std::ostringstream msg;
    msg << "all tuning runs diverged; failed grid points:";
    for (const auto& p : points) {
      msg << " (" << p.particle_step << ", " << p.theta_step << ")";
    }
    throw std::runtime_error(msg.str());
  }
  result.chosen = points[best];
  return result;
}

}  // namespace jarzmle
