// Experiment runner: fit latent variable models with the weighted-ULA
// engine or the comparator algorithms, run the model-selection and tuning
// protocols, and write CSV/JSON artifacts.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jarzmle/baselines.hpp"
#include "jarzmle/csv.hpp"
#include "jarzmle/data.hpp"
#include "jarzmle/engine.hpp"
#include "jarzmle/evaluation.hpp"
#include "jarzmle/jarzynski.hpp"
#include "jarzmle/models/conjugate_gaussian.hpp"
#include "jarzmle/models/linear_regression.hpp"
#include "jarzmle/models/logistic_regression.hpp"
#include "jarzmle/models/tiny_bnn.hpp"
#include "jarzmle/selection.hpp"

using json = nlohmann::json;
using namespace jarzmle;

namespace {

constexpr const char* kVersion = "jarzmle-0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config plumbing

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string config_hash(const json& config) {
  // nlohmann objects are key-sorted, so dump() is canonical
  std::ostringstream hex;
  hex << std::hex << fnv1a(config.dump());
  return hex.str();
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
T get_required(const json& obj, const std::string& key,
               const std::string& context) {
  if (!obj.contains(key)) {
    throw ConfigError("missing key '" + key + "' in " + context);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + context);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "'");
  }
}

Vector get_vector(const json& obj, const std::string& key,
                  const std::string& context) {
  const auto values = get_required<std::vector<double>>(obj, key, context);
  Vector v(static_cast<Index>(values.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = values[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json meta_block(const json& config, std::uint64_t seed) {
  return json{{"config_hash", config_hash(config)},
              {"seed", seed},
              {"version", kVersion}};
}

std::vector<std::string> meta_comments(const json& config, std::uint64_t seed) {
  return {"config_hash=" + config_hash(config) + " seed=" + std::to_string(seed) +
          " version=" + kVersion};
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// dataset + model construction

struct LoadedData {
  Matrix features;           // regression design or classifier features
  Vector targets;            // regression targets or 0/1 labels
  IntVector int_labels;      // classification view of targets
  std::string ground_truth;  // "gaussian" / "student-t" for generated data
  json split_metadata;       // present when a file split was performed
};

IntVector to_int_labels(const Vector& targets) {
  IntVector labels(targets.size());
  for (Index i = 0; i < targets.size(); ++i) {
    labels[i] = static_cast<int>(targets[i]);
  }
  return labels;
}

LoadedData load_data(const json& spec, std::uint64_t seed_shift) {
  const std::string source = get_required<std::string>(spec, "source", "data");
  LoadedData out;
  if (source == "wisconsin") {
    require_keys(spec, {"source", "path", "split"}, "data");
    const auto path = get_required<std::string>(spec, "path", "data");
    TabularDataset full = load_wisconsin(path);
    if (spec.contains("split")) {
      const json& split = spec.at("split");
      require_keys(split, {"fraction", "seed", "part"}, "data.split");
      const double fraction = get_required<double>(split, "fraction", "data.split");
      const auto split_seed = get_required<std::uint64_t>(split, "seed", "data.split");
      const auto part = get_or<std::string>(split, "part", std::string("train"));
      std::vector<Index> train_idx, test_idx;
      auto [train, test] =
          stratified_split(full, fraction, split_seed, &train_idx, &test_idx);
      const TabularDataset& chosen = part == "test" ? test : train;
      out.features = chosen.features;
      out.targets = chosen.targets;
      out.split_metadata = json{{"seed", split_seed},
                                {"fraction", fraction},
                                {"train_indices", train_idx},
                                {"test_indices", test_idx},
                                {"column_means", to_std(train.column_means)},
                                {"column_stds", to_std(train.column_stds)},
                                {"std_divisor", train.std_divisor}};
    } else {
      out.features = full.features;
      out.targets = full.targets;
    }
  } else if (source == "gen-linreg") {
    require_keys(spec,
                 {"source", "d_y", "d_x", "alpha_star", "sigma_star", "error",
                  "nu_star", "seed"},
                 "data");
    const auto error = get_or<std::string>(spec, "error", std::string("gaussian"));
    if (error != "gaussian" && error != "student-t") {
      throw ConfigError("data.error must be 'gaussian' or 'student-t'");
    }
    const auto data = gen_linreg_data(
        get_required<Index>(spec, "d_y", "data"),
        get_required<Index>(spec, "d_x", "data"),
        get_or<double>(spec, "alpha_star", 1.0),
        get_or<double>(spec, "sigma_star", 1.0),
        error == "gaussian" ? ErrorKind::Gaussian : ErrorKind::StudentT,
        get_or<double>(spec, "nu_star", 4.0),
        get_or<std::uint64_t>(spec, "seed", 0) + seed_shift);
    out.features = data.x;
    out.targets = data.y;
    out.ground_truth = error;
  } else if (source == "gen-poly") {
    require_keys(
        spec, {"source", "d_y", "p_star", "alpha_star", "sigma_sq_star", "seed"},
        "data");
    const auto data = gen_poly_data(get_required<Index>(spec, "d_y", "data"),
                                    get_required<int>(spec, "p_star", "data"),
                                    get_or<double>(spec, "alpha_star", 1.0),
                                    get_or<double>(spec, "sigma_sq_star", 7.5),
                                    get_or<std::uint64_t>(spec, "seed", 0) + seed_shift);
    out.features = data.x;  // single column of raw inputs
    out.targets = data.y;
  } else if (source == "two-moons") {
    require_keys(spec, {"source", "n", "noise", "seed"}, "data");
    const auto data = gen_two_moons(get_required<Index>(spec, "n", "data"),
                                    get_or<double>(spec, "noise", 0.15),
                                    get_or<std::uint64_t>(spec, "seed", 0) + seed_shift);
    out.features = data.x;
    out.targets.resize(data.labels.size());
    for (Index i = 0; i < data.labels.size(); ++i) {
      out.targets[i] = static_cast<double>(data.labels[i]);
    }
  } else {
    throw ConfigError("unknown data source '" + source + "'");
  }
  out.int_labels = to_int_labels(out.targets);
  return out;
}

std::unique_ptr<LatentModel> build_model(const json& spec,
                                         std::uint64_t seed_shift,
                                         LoadedData* data_out = nullptr) {
  const std::string kind = get_required<std::string>(spec, "kind", "model");
  if (kind == "conjugate-gaussian") {
    require_keys(spec, {"kind", "y_obs"}, "model");
    return std::make_unique<ConjugateGaussianModel>(
        get_required<double>(spec, "y_obs", "model"));
  }
  if (!spec.contains("data")) throw ConfigError("model needs a data block");
  LoadedData data = load_data(spec.at("data"), seed_shift);
  if (data_out != nullptr) *data_out = data;
  if (kind == "blr") {
    require_keys(spec, {"kind", "data", "sigma0_sq"}, "model");
    return std::make_unique<BayesianLogisticModel>(
        data.features, data.targets, get_or<double>(spec, "sigma0_sq", 5.0));
  }
  if (kind == "gaussian-linreg") {
    require_keys(spec, {"kind", "data"}, "model");
    return std::make_unique<GaussianLinRegModel>(data.features, data.targets);
  }
  if (kind == "student-t-linreg") {
    require_keys(spec, {"kind", "data", "nu_prior_rate"}, "model");
    return std::make_unique<StudentTLinRegModel>(
        data.features, data.targets, get_or<double>(spec, "nu_prior_rate", 0.1));
  }
  if (kind == "polynomial") {
    require_keys(spec, {"kind", "data", "order"}, "model");
    if (data.features.cols() != 1) {
      throw ConfigError("polynomial model needs single-column raw inputs");
    }
    return std::make_unique<PolynomialRegModel>(
        data.features.col(0), data.targets,
        get_required<int>(spec, "order", "model"));
  }
  if (kind == "tiny-bnn") {
    require_keys(spec, {"kind", "data", "hidden_units", "n_classes"}, "model");
    return std::make_unique<TinyBnnModel>(
        data.features, data.int_labels, get_or<Index>(spec, "hidden_units", 8),
        get_or<Index>(spec, "n_classes", 2));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

RunConfig parse_run_config(const json& run) {
  require_keys(run,
               {"n_particles", "n_iterations", "langevin_step", "optimizer",
                "ess_threshold_fraction", "seed", "theta_init",
                "gradient_clip_norm", "normalize_gradient"},
               "run");
  RunConfig config;
  config.n_particles = get_required<Index>(run, "n_particles", "run");
  config.n_iterations = get_required<long>(run, "n_iterations", "run");
  config.langevin_step = get_or<double>(run, "langevin_step", 0.1);
  config.ess_threshold_fraction = get_or<double>(run, "ess_threshold_fraction", 0.0);
  config.seed = get_or<std::uint64_t>(run, "seed", 0);
  config.theta_init = get_vector(run, "theta_init", "run");
  config.gradient_clip_norm = get_or<double>(run, "gradient_clip_norm", 1e4);
  config.normalize_gradient = get_or<bool>(run, "normalize_gradient", false);
  if (run.contains("optimizer")) {
    const json& opt = run.at("optimizer");
    require_keys(opt, {"kind", "gamma", "beta1", "beta2", "epsilon"},
                 "run.optimizer");
    const auto kind = get_required<std::string>(opt, "kind", "run.optimizer");
    const double gamma = get_required<double>(opt, "gamma", "run.optimizer");
    if (kind == "sgd") {
      config.optimizer = OptimizerSpec::sgd(gamma);
    } else if (kind == "adam") {
      config.optimizer = OptimizerSpec::adam(
          gamma, get_or<double>(opt, "beta1", 0.9),
          get_or<double>(opt, "beta2", 0.999), get_or<double>(opt, "epsilon", 1e-8));
    } else {
      throw ConfigError("optimizer kind must be 'sgd' or 'adam'");
    }
  }
  return config;
}

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<long> repeats;
  int threads = 1;
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("JARZMLE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(trial) for trial in [0, n) on a small worker pool; every trial
// owns its outputs, so the result does not depend on scheduling.
void run_trials(long n, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (long t = 0; t < n; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  const int workers = static_cast<int>(std::min<long>(threads, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        while (true) {
          const long t = next.fetch_add(1);
          if (t >= n) break;
          fn(t);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& worker : pool) worker.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

// ---------------------------------------------------------------------------
// fit

double resolve_log_z0(const json& config, const LatentModel& model,
                      const RunConfig& run, long is_samples) {
  if (!config.contains("log_z0")) return 0.0;
  const json& z = config.at("log_z0");
  if (z.is_number()) return z.get<double>();
  const auto mode = z.get<std::string>();
  if (mode == "analytic") {
    if (const auto* conjugate = dynamic_cast<const ConjugateGaussianModel*>(&model)) {
      return conjugate->marginal_log_evidence(run.theta_init[0]);
    }
    if (const auto* linreg = dynamic_cast<const GaussianLinRegModel*>(&model)) {
      return linreg->log_evidence(run.theta_init);
    }
    if (const auto* poly = dynamic_cast<const PolynomialRegModel*>(&model)) {
      return poly->base().log_evidence(run.theta_init);
    }
    throw ConfigError("log_z0 'analytic' unavailable for this model");
  }
  if (mode == "importance-sampling") {
    if (const auto* st = dynamic_cast<const StudentTLinRegModel*>(&model)) {
      RngStream rng(stream_key(run.seed, rng_tag::kInit, 0x15));
      return is_evidence_student_t(*st, run.theta_init, is_samples, rng);
    }
    throw ConfigError("log_z0 'importance-sampling' needs a student-t model");
  }
  throw ConfigError("log_z0 must be a number, 'analytic' or 'importance-sampling'");
}

int cmd_fit(const json& config, const CliOverrides& overrides) {
  require_keys(config,
               {"experiment", "model", "algorithm", "run", "log_z0",
                "is_samples", "output_dir", "repeats"},
               "config");
  RunConfig base_run = parse_run_config(config.at("run"));
  if (overrides.seed) base_run.seed = *overrides.seed;
  const long repeats = overrides.repeats.value_or(get_or<long>(config, "repeats", 1));
  const std::string out_dir =
      overrides.out.value_or(get_or<std::string>(config, "output_dir", std::string(".")));
  std::filesystem::create_directories(out_dir);

  const json& algorithm = config.at("algorithm");
  const auto alg_kind = get_required<std::string>(algorithm, "kind", "algorithm");

  std::vector<int> exit_codes(static_cast<std::size_t>(repeats), 0);
  run_trials(repeats, overrides.threads, [&](long trial) {
    RunConfig run = base_run;
    run.seed = base_run.seed + static_cast<std::uint64_t>(trial);
    const std::string suffix = repeats > 1 ? "_" + std::to_string(trial) : "";

    LoadedData data;
    const auto model =
        build_model(config.at("model"), static_cast<std::uint64_t>(trial), &data);

    Trajectory trajectory;
    Vector theta_final;
    Matrix positions;
    Vector weights;
    json result_extra;
    try {
      if (alg_kind == "jala-em") {
        require_keys(algorithm, {"kind"}, "algorithm");
        const double log_z0 = resolve_log_z0(config, *model, run,
                                             get_or<long>(config, "is_samples", 5000));
        FitResult fit = run_jala_em(*model, run, log_z0);
        theta_final = fit.theta_final;
        positions = fit.positions_final;
        weights = fit.weights_final;
        result_extra["log_evidence_final"] = fit.log_evidence_final;
        trajectory = std::move(fit.trajectory);
      } else {
        BaselineConfig baseline;
        if (alg_kind == "pgd") {
          baseline.kind = BaselineConfig::Kind::Pgd;
        } else if (alg_kind == "ipla") {
          baseline.kind = BaselineConfig::Kind::Ipla;
        } else if (alg_kind == "sfla") {
          baseline.kind = BaselineConfig::Kind::Sfla;
        } else if (alg_kind == "soul") {
          baseline.kind = BaselineConfig::Kind::Soul;
        } else {
          throw ConfigError("unknown algorithm '" + alg_kind + "'");
        }
        require_keys(algorithm, {"kind", "gamma", "theta_gamma", "beta", "epsilon"},
                     "algorithm");
        baseline.gamma = get_required<double>(algorithm, "gamma", "algorithm");
        baseline.soul_theta_gamma = get_or<double>(algorithm, "theta_gamma", 0.1);
        baseline.sfla_beta = get_or<double>(algorithm, "beta", 1e3);
        baseline.sfla_epsilon = get_or<double>(algorithm, "epsilon", 0.1);
        baseline.n_particles = run.n_particles;
        baseline.n_iterations = run.n_iterations;
        baseline.seed = run.seed;
        baseline.theta_init = run.theta_init;
        BaselineResult fit = run_baseline(*model, baseline);
        theta_final = fit.theta_final;
        positions = fit.ensemble;
        weights = Vector::Constant(positions.rows(),
                                   1.0 / static_cast<double>(positions.rows()));
        trajectory = std::move(fit.trajectory);
      }
    } catch (const RunError& e) {
      json diagnostic{{"error", e.what()},
                      {"iteration", e.iteration()},
                      {"trial", trial},
                      {"_meta", meta_block(config, run.seed)}};
      write_json(std::filesystem::path(out_dir) / ("failure" + suffix + ".json"),
                 diagnostic);
      std::cerr << diagnostic.dump() << '\n';
      exit_codes[static_cast<std::size_t>(trial)] = kExitRuntime;
      return;
    }

    const auto comments = meta_comments(config, run.seed);
    {
      std::ofstream out(std::filesystem::path(out_dir) /
                        ("trajectory" + suffix + ".csv"));
      trajectory.write_csv(out, comments);
    }
    {
      std::ofstream out(std::filesystem::path(out_dir) /
                        ("particles" + suffix + ".csv"));
      for (const auto& comment : comments) out << "# " << comment << '\n';
      for (Index j = 0; j < positions.cols(); ++j) out << 'x' << j << ',';
      out << "weight\n";
      for (Index i = 0; i < positions.rows(); ++i) {
        for (Index j = 0; j < positions.cols(); ++j) {
          out << format_double(positions(i, j)) << ',';
        }
        out << format_double(weights[i]) << '\n';
      }
    }
    json result{{"theta_final", to_std(theta_final)},
                {"iterations", trajectory.rows.empty() ? 0L : trajectory.rows.back().k},
                {"algorithm", alg_kind},
                {"trial", trial},
                {"_meta", meta_block(config, run.seed)}};
    result.update(result_extra);
    if (!data.split_metadata.is_null()) {
      json split_meta = data.split_metadata;
      split_meta["_meta"] = meta_block(config, run.seed);
      write_json(std::filesystem::path(out_dir) / ("split_metadata" + suffix + ".json"),
                 split_meta);
    }
    write_json(std::filesystem::path(out_dir) / ("fit_result" + suffix + ".json"),
               result);
  });

  for (const int code : exit_codes) {
    if (code != 0) return code;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// select-error-model

int cmd_select_error_model(const json& config, const CliOverrides& overrides) {
  require_keys(config,
               {"experiment", "data", "run", "theta_init_gaussian",
                "theta_init_student_t", "is_samples", "nu_prior_rate",
                "output_dir", "repeats"},
               "config");
  json run_spec = config.at("run");
  if (!run_spec.contains("theta_init")) run_spec["theta_init"] = {0.0};
  RunConfig base_run = parse_run_config(run_spec);
  if (overrides.seed) base_run.seed = *overrides.seed;
  const long repeats = overrides.repeats.value_or(get_or<long>(config, "repeats", 1));
  const std::string out_dir =
      overrides.out.value_or(get_or<std::string>(config, "output_dir", std::string(".")));
  std::filesystem::create_directories(out_dir);

  Vector theta_g(2);
  theta_g << 1.0, 1.0;
  if (config.contains("theta_init_gaussian")) {
    theta_g = get_vector(config, "theta_init_gaussian", "config");
  }
  Vector theta_t(3);
  theta_t << 1.0, 1.0, StudentTLinRegModel::kPhi3Max;
  if (config.contains("theta_init_student_t")) {
    theta_t = get_vector(config, "theta_init_student_t", "config");
  }
  const long is_samples = get_or<long>(config, "is_samples", 5000L);
  const double nu_rate = get_or<double>(config, "nu_prior_rate", 0.1);

  std::vector<json> trials(static_cast<std::size_t>(repeats));
  run_trials(repeats, overrides.threads, [&](long trial) {
    const LoadedData data =
        load_data(config.at("data"), static_cast<std::uint64_t>(trial));

    RunConfig run = base_run;
    run.seed = base_run.seed + static_cast<std::uint64_t>(trial);

    // Gaussian-error candidate: analytic evidence at the initial parameters
    const GaussianLinRegModel gaussian(data.features, data.targets);
    run.theta_init = theta_g;
    const double log_z0_g = gaussian.log_evidence(theta_g);
    const FitResult fit_g = run_jala_em(gaussian, run, log_z0_g);

    // Student-t candidate: importance-sampling evidence, warm-started chains
    const StudentTLinRegModel student(data.features, data.targets, nu_rate);
    RunConfig run_t = run;
    run_t.theta_init = theta_t;
    run_t.seed = run.seed + 0x51ull;
    RngStream is_rng(stream_key(run_t.seed, rng_tag::kInit, 0x15));
    const double log_z0_t = is_evidence_student_t(student, theta_t, is_samples, is_rng);
    const FitResult fit_t = run_jala_em(student, run_t, log_z0_t);

    const double log_bf =
        bayes_factor(fit_g.log_evidence_final, fit_t.log_evidence_final);
    const std::string decision = log_bf > 0.0 ? "gaussian" : "student-t";

    const auto model_report = [](const std::string& name, double log_z0,
                                 const FitResult& fit, bool selected) {
      const EvidenceReport report = evidence_report_from_fit(log_z0, fit);
      return json{{"model", name},
                  {"log_Z0", report.log_z0},
                  {"log_Z_final", report.log_z_final},
                  {"selected", selected},
                  {"log_Z_trajectory", report.log_z_trajectory},
                  {"theta_final", to_std(fit.theta_final)}};
    };

    json trial_report{
        {"trial", trial},
        {"models", json::array({model_report("gaussian", log_z0_g, fit_g,
                                             decision == "gaussian"),
                                model_report("student-t", log_z0_t, fit_t,
                                             decision == "student-t")})},
        {"log_bayes_factor", log_bf},
        {"decision", decision}};
    if (!data.ground_truth.empty()) {
      trial_report["truth"] = data.ground_truth;
      trial_report["correct"] = (decision == data.ground_truth);
    }
    trials[static_cast<std::size_t>(trial)] = std::move(trial_report);
  });

  long correct = 0, scored = 0;
  for (const auto& trial : trials) {
    if (trial.contains("correct")) {
      ++scored;
      if (trial.at("correct").get<bool>()) ++correct;
    }
  }
  json report{{"repeats", trials}, {"_meta", meta_block(config, base_run.seed)}};
  if (scored > 0) {
    report["correct_rate"] = static_cast<double>(correct) / static_cast<double>(scored);
  }
  write_json(std::filesystem::path(out_dir) / "error_model_selection.json", report);
  return 0;
}

// ---------------------------------------------------------------------------
// select-order

int cmd_select_order(const json& config, const CliOverrides& overrides) {
  require_keys(config,
               {"experiment", "data", "orders", "run", "output_dir", "repeats"},
               "config");
  json run_spec = config.at("run");
  if (!run_spec.contains("theta_init")) run_spec["theta_init"] = {1.0, 1.0};
  // "auto" derives the Euler-stable step from the stiffest candidate design
  const bool auto_step = run_spec.contains("langevin_step") &&
                         run_spec.at("langevin_step").is_string() &&
                         run_spec.at("langevin_step").get<std::string>() == "auto";
  if (auto_step) run_spec.erase("langevin_step");
  RunConfig base_run = parse_run_config(run_spec);
  if (overrides.seed) base_run.seed = *overrides.seed;
  const long repeats = overrides.repeats.value_or(get_or<long>(config, "repeats", 1));
  const std::string out_dir =
      overrides.out.value_or(get_or<std::string>(config, "output_dir", std::string(".")));
  std::filesystem::create_directories(out_dir);

  const json& orders_spec = config.at("orders");
  require_keys(orders_spec, {"min", "max"}, "orders");
  std::vector<int> orders;
  for (int p = get_required<int>(orders_spec, "min", "orders");
       p <= get_required<int>(orders_spec, "max", "orders"); ++p) {
    orders.push_back(p);
  }
  if (orders.empty()) throw ConfigError("orders range is empty");

  std::vector<json> trials(static_cast<std::size_t>(repeats));
  std::vector<int> jala_picks(static_cast<std::size_t>(repeats));
  std::vector<int> bic_picks(static_cast<std::size_t>(repeats));

  run_trials(repeats, overrides.threads, [&](long trial) {
    const LoadedData data =
        load_data(config.at("data"), static_cast<std::uint64_t>(trial));
    RunConfig run = base_run;
    run.seed = base_run.seed + static_cast<std::uint64_t>(trial);

    const Vector x_raw = data.features.col(0);
    if (auto_step) {
      run.langevin_step = stable_langevin_step(
          polynomial_design(x_raw, orders.back()), std::exp(run.theta_init[0]),
          std::exp(run.theta_init[1]));
    }
    const OrderSelectionResult jala =
        select_order_jala(x_raw, data.targets, orders, run);

    // least-squares + information-criterion comparator on identical data
    int bic_pick = orders.front();
    double best_bic = std::numeric_limits<double>::infinity();
    json bic_rows = json::array();
    for (const int p : orders) {
      const Matrix design = polynomial_design(x_raw, p);
      const OlsFit fit = ols_fit(design, data.targets);
      const double n = static_cast<double>(data.targets.size());
      const double log_lik =
          -0.5 * n * (std::log(2.0 * std::numbers::pi * fit.sigma_sq) + 1.0);
      const double score = bic(p, data.targets.size(), log_lik);
      bic_rows.push_back(json{{"order", p}, {"bic", score}});
      if (score < best_bic) {
        best_bic = score;
        bic_pick = p;
      }
    }

    json candidates = json::array();
    for (const auto& c : jala.candidates) {
      candidates.push_back(json{{"order", c.order},
                                {"log_Z0", c.log_z0},
                                {"log_Z_final", c.log_z_final},
                                {"selected", c.selected}});
    }
    trials[static_cast<std::size_t>(trial)] = json{{"trial", trial},
                                                   {"selected_order", jala.selected_order},
                                                   {"bic_order", bic_pick},
                                                   {"candidates", candidates},
                                                   {"bic_scores", bic_rows}};
    jala_picks[static_cast<std::size_t>(trial)] = jala.selected_order;
    bic_picks[static_cast<std::size_t>(trial)] = bic_pick;
  });

  json report{{"repeats", trials}, {"_meta", meta_block(config, base_run.seed)}};
  if (config.at("data").contains("p_star")) {
    const int p_star = config.at("data").at("p_star").get<int>();
    report["p_star"] = p_star;
    report["jala_mae"] = order_mae(jala_picks, p_star);
    report["bic_mae"] = order_mae(bic_picks, p_star);
  }
  write_json(std::filesystem::path(out_dir) / "order_selection.json", report);
  return 0;
}

// ---------------------------------------------------------------------------
// tune

int cmd_tune(const json& config, const CliOverrides& overrides) {
  require_keys(config, {"experiment", "algorithm", "data", "split", "sigma0_sq",
                        "n_particles", "seed", "grid", "output_dir"},
               "config");
  const std::string out_dir =
      overrides.out.value_or(get_or<std::string>(config, "output_dir", std::string(".")));
  std::filesystem::create_directories(out_dir);
  const std::uint64_t seed =
      overrides.seed.value_or(get_or<std::uint64_t>(config, "seed", 0));

  json data_spec = config.at("data");
  if (config.contains("split")) {
    // tuning runs on the train part of the split
    data_spec["split"] = config.at("split");
    data_spec["split"]["part"] = "train";
  }
  const LoadedData data = load_data(data_spec, 0);

  const json& algorithm = config.at("algorithm");
  require_keys(algorithm, {"kind"}, "algorithm");
  const auto alg_name = get_required<std::string>(algorithm, "kind", "algorithm");
  TuneAlgorithm alg;
  if (alg_name == "jala-em") {
    alg = TuneAlgorithm::JalaEm;
  } else if (alg_name == "pgd") {
    alg = TuneAlgorithm::Pgd;
  } else if (alg_name == "soul") {
    alg = TuneAlgorithm::Soul;
  } else {
    throw ConfigError("tune supports jala-em, pgd, soul");
  }

  const double sigma0_sq = get_or<double>(config, "sigma0_sq", 5.0);
  TuneGrid grid = TuneGrid::for_blr(data.features, sigma0_sq);
  if (config.contains("grid")) {
    const json& g = config.at("grid");
    require_keys(g,
                 {"particle_step_values", "theta_step_values", "folds",
                  "max_iters", "early_stop_eps", "patience", "eval_interval"},
                 "grid");
    if (g.contains("particle_step_values")) {
      grid.particle_step_values =
          g.at("particle_step_values").get<std::vector<double>>();
    }
    if (g.contains("theta_step_values")) {
      grid.theta_step_values = g.at("theta_step_values").get<std::vector<double>>();
    }
    grid.folds = get_or<int>(g, "folds", grid.folds);
    grid.max_iters = get_or<long>(g, "max_iters", grid.max_iters);
    grid.early_stop_eps = get_or<double>(g, "early_stop_eps", grid.early_stop_eps);
    grid.patience = get_or<int>(g, "patience", grid.patience);
    grid.eval_interval = get_or<long>(g, "eval_interval", grid.eval_interval);
  }

  const TuneResult result = cv_tune(alg, data.features, data.targets, sigma0_sq,
                                    grid, get_or<Index>(config, "n_particles", 100),
                                    seed);

  {
    std::ofstream out(std::filesystem::path(out_dir) / "tuning_report.csv");
    result.write_csv(out, meta_comments(config, seed));
  }
  write_json(std::filesystem::path(out_dir) / "chosen_steps.json",
             json{{"algorithm", alg_name},
                  {"particle_step", result.chosen.particle_step},
                  {"theta_step", result.chosen.theta_step},
                  {"_meta", meta_block(config, seed)}});
  if (!data.split_metadata.is_null()) {
    json split_meta = data.split_metadata;
    split_meta["_meta"] = meta_block(config, seed);
    write_json(std::filesystem::path(out_dir) / "split_metadata.json", split_meta);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// probe-mse

int cmd_probe_mse(const json& config, const CliOverrides& overrides) {
  require_keys(config, {"experiment", "model", "theta", "particle_counts",
                        "trials", "seed", "output_dir"},
               "config");
  const json& model_spec = config.at("model");
  require_keys(model_spec, {"kind", "y_obs"}, "model");
  if (get_required<std::string>(model_spec, "kind", "model") != "conjugate-gaussian") {
    throw ConfigError("probe-mse needs the conjugate-gaussian model");
  }
  const ConjugateGaussianModel model(get_required<double>(model_spec, "y_obs", "model"));
  const Vector theta = get_vector(config, "theta", "config");
  const auto counts = get_required<std::vector<long>>(config, "particle_counts", "config");
  const long trials = get_or<long>(config, "trials", 200L);
  const std::uint64_t seed =
      overrides.seed.value_or(get_or<std::uint64_t>(config, "seed", 0));
  const std::string out_dir =
      overrides.out.value_or(get_or<std::string>(config, "output_dir", std::string(".")));
  std::filesystem::create_directories(out_dir);

  const auto points = mse_scaling_probe(
      model, theta, [&](const Vector& t) { return model.marginal_grad(t); }, counts,
      trials, seed);
  const double slope = mse_loglog_slope(points);

  {
    std::ofstream out(std::filesystem::path(out_dir) / "mse_scaling.csv");
    for (const auto& comment : meta_comments(config, seed)) {
      out << "# " << comment << '\n';
    }
    out << "n_particles,mse\n";
    for (const auto& p : points) {
      out << p.n_particles << ',' << format_double(p.mse) << '\n';
    }
  }
  write_json(std::filesystem::path(out_dir) / "mse_scaling.json",
             json{{"slope", slope}, {"_meta", meta_block(config, seed)}});
  return 0;
}

json load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  const auto declared = get_required<std::string>(config, "experiment", "config");
  if (declared != experiment) {
    throw ConfigError("config experiment '" + declared +
                      "' does not match subcommand '" + experiment + "'");
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-ULA maximum marginal likelihood experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_flag = 0;
  std::string out_flag;
  long repeats_flag = 0;
  int threads_flag = 0;

  CLI::App* fit = app.add_subcommand("fit", "run one fitting experiment");
  CLI::App* select_error =
      app.add_subcommand("select-error-model", "Gaussian vs Student-t evidence race");
  CLI::App* select_order =
      app.add_subcommand("select-order", "polynomial order selection with a BIC baseline");
  CLI::App* tune = app.add_subcommand("tune", "cross-validated step-size search");
  CLI::App* probe = app.add_subcommand("probe-mse", "gradient MSE scaling probe");
  for (CLI::App* cmd : {fit, select_error, select_order, tune, probe}) {
    cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option("--seed", seed_flag, "override base seed");
    cmd->add_option("--out", out_flag, "override output directory");
    cmd->add_option("--repeats", repeats_flag, "override repeat count");
    cmd->add_option("--threads", threads_flag,
                    "worker threads (default: JARZMLE_THREADS or hardware)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  CliOverrides overrides;
  for (CLI::App* cmd : {fit, select_error, select_order, tune, probe}) {
    if (cmd->parsed()) {
      if (cmd->count("--seed") > 0) overrides.seed = seed_flag;
      if (cmd->count("--out") > 0) overrides.out = out_flag;
      if (cmd->count("--repeats") > 0) overrides.repeats = repeats_flag;
    }
  }
  overrides.threads = resolve_threads(threads_flag);

  try {
    if (fit->parsed()) return cmd_fit(load_config(config_path, "fit"), overrides);
    if (select_error->parsed()) {
      return cmd_select_error_model(load_config(config_path, "select-error-model"),
                                    overrides);
    }
    if (select_order->parsed()) {
      return cmd_select_order(load_config(config_path, "select-order"), overrides);
    }
    if (tune->parsed()) return cmd_tune(load_config(config_path, "tune"), overrides);
    if (probe->parsed()) {
      return cmd_probe_mse(load_config(config_path, "probe-mse"), overrides);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RunError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"iteration", e.iteration()}}.dump()
              << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
