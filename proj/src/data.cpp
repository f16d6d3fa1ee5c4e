#include "jarzmle/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "jarzmle/csv.hpp"
#include "jarzmle/rng.hpp"

namespace jarzmle {

Matrix TabularDataset::destandardized() const {
  Matrix raw = features;
  for (Index j = 0; j < raw.cols(); ++j) {
    raw.col(j) = raw.col(j) * column_stds[j] + Vector::Constant(raw.rows(), column_means[j]);
  }
  return raw;
}

std::pair<Vector, Vector> column_stats(const Matrix& x) {
  const double n = static_cast<double>(x.rows());
  Vector means = x.colwise().mean();
  Vector stds(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    stds[j] = std::sqrt((x.col(j).array() - means[j]).square().sum() / n);
  }
  return {means, stds};
}

Matrix apply_standardization(const Matrix& x, const Vector& means,
                             const Vector& stds) {
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    if (!(stds[j] > 0.0)) {
      throw std::runtime_error("column " + std::to_string(j) +
                               " has zero standard deviation");
    }
    out.col(j) = (x.col(j).array() - means[j]) / stds[j];
  }
  return out;
}

TabularDataset load_wisconsin(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  constexpr int kColumns = 11;  // id + 9 features + class
  std::vector<std::array<double, 9>> rows;
  std::vector<double> labels;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != kColumns) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": expected " +
                               std::to_string(kColumns) + " columns, got " +
                               std::to_string(fields.size()));
    }
    const bool missing = std::any_of(fields.begin(), fields.end(),
                                     [](const std::string& f) { return f == "?"; });
    if (missing) continue;

    std::array<double, 9> row{};
    try {
      for (int j = 0; j < 9; ++j) row[static_cast<std::size_t>(j)] = parse_double(fields[j + 1]);
      const double cls = parse_double(fields[10]);
      if (cls != 2.0 && cls != 4.0) {
        throw std::runtime_error("class must be 2 or 4");
      }
      labels.push_back(cls == 2.0 ? 0.0 : 1.0);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_number) + ": " + e.what());
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no usable rows");

  TabularDataset data;
  data.raw_features.resize(static_cast<Index>(rows.size()), 9);
  data.targets.resize(static_cast<Index>(rows.size()));
  for (Index i = 0; i < data.raw_features.rows(); ++i) {
    for (Index j = 0; j < 9; ++j) {
      data.raw_features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    data.targets[i] = labels[static_cast<std::size_t>(i)];
  }
  std::tie(data.column_means, data.column_stds) = column_stats(data.raw_features);
  data.features = apply_standardization(data.raw_features, data.column_means,
                                        data.column_stds);
  return data;
}

std::pair<TabularDataset, TabularDataset> stratified_split(
    const TabularDataset& data, double fraction, std::uint64_t seed,
    std::vector<Index>* train_indices, std::vector<Index>* test_indices) {
  if (!(fraction >= 0.0) || !(fraction <= 1.0)) {
    throw std::invalid_argument("fraction must be in [0, 1]");
  }

  std::map<double, std::vector<Index>> by_class;
  for (Index i = 0; i < data.n_rows(); ++i) by_class[data.targets[i]].push_back(i);

  RngStream rng(stream_key(seed, rng_tag::kData));
  std::vector<Index> train, test;
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw std::runtime_error("class " + std::to_string(label) +
                               " has fewer than 2 samples");
    }
    // Fisher-Yates with the seeded stream
    for (std::size_t i = indices.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
      std::swap(indices[i - 1], indices[std::min(j, i - 1)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(indices.size())));
    train.insert(train.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), indices.begin() + static_cast<std::ptrdiff_t>(n_train), indices.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  if (train_indices != nullptr) *train_indices = train;
  if (test_indices != nullptr) *test_indices = test;

  const auto take = [&](const std::vector<Index>& idx) {
    Matrix raw(static_cast<Index>(idx.size()), data.raw_features.cols());
    Vector t(static_cast<Index>(idx.size()));
    for (Index i = 0; i < raw.rows(); ++i) {
      raw.row(i) = data.raw_features.row(idx[static_cast<std::size_t>(i)]);
      t[i] = data.targets[idx[static_cast<std::size_t>(i)]];
    }
    return std::make_pair(raw, t);
  };

  auto [train_raw, train_targets] = take(train);
  auto [test_raw, test_targets] = take(test);

  TabularDataset train_set;
  train_set.raw_features = std::move(train_raw);
  train_set.targets = std::move(train_targets);
  std::tie(train_set.column_means, train_set.column_stds) =
      column_stats(train_set.raw_features);
  train_set.features = apply_standardization(
      train_set.raw_features, train_set.column_means, train_set.column_stds);
  train_set.split_tag = "train";

  // test side standardized with train statistics
  TabularDataset test_set;
  test_set.raw_features = std::move(test_raw);
  test_set.targets = std::move(test_targets);
  test_set.column_means = train_set.column_means;
  test_set.column_stds = train_set.column_stds;
  if (test_set.raw_features.rows() > 0) {
    test_set.features = apply_standardization(
        test_set.raw_features, test_set.column_means, test_set.column_stds);
  } else {
    test_set.features.resize(0, data.raw_features.cols());
  }
  test_set.split_tag = "test";
  return {std::move(train_set), std::move(test_set)};
}

LinRegData gen_linreg_data(Index d_y, Index d_x, double alpha_star,
                           double sigma_star, ErrorKind error_kind,
                           double nu_star, std::uint64_t seed) {
  if (!(alpha_star > 0.0)) throw std::invalid_argument("alpha_star must be > 0");
  RngStream rng(stream_key(seed, rng_tag::kData, 1));
  LinRegData data;
  data.x.resize(d_y, d_x);
  for (Index i = 0; i < d_y; ++i) {
    for (Index j = 0; j < d_x; ++j) data.x(i, j) = rng.normal();
  }
  const double w_sd = 1.0 / std::sqrt(alpha_star);
  data.w_true = w_sd * rng.normal_vector(d_x);
  data.y = data.x * data.w_true;
  for (Index i = 0; i < d_y; ++i) {
    double noise = rng.normal();
    if (error_kind == ErrorKind::StudentT) {
      const double chi_sq = 2.0 * gamma_draw(rng, 0.5 * nu_star, 1.0);
      noise /= std::sqrt(chi_sq / nu_star);
    }
    data.y[i] += sigma_star * noise;
  }
  return data;
}

PolyData gen_poly_data(Index d_y, int p_star, double alpha_star,
                       double sigma_sq_star, std::uint64_t seed) {
  if (p_star < 0) throw std::invalid_argument("p_star must be >= 0");
  RngStream rng(stream_key(seed, rng_tag::kData, 2));
  PolyData data;
  data.x.resize(d_y);
  for (Index i = 0; i < d_y; ++i) data.x[i] = -2.5 + 5.0 * rng.uniform();
  data.w_true = rng.normal_vector(p_star + 1) / std::sqrt(alpha_star);
  Matrix design(d_y, p_star + 1);
  for (Index i = 0; i < d_y; ++i) {
    for (int j = 0; j <= p_star; ++j) design(i, j) = std::pow(data.x[i], j);
  }
  data.y = design * data.w_true;
  const double sigma = std::sqrt(sigma_sq_star);
  for (Index i = 0; i < d_y; ++i) data.y[i] += sigma * rng.normal();
  return data;
}

TwoMoonsData gen_two_moons(Index n, double noise, std::uint64_t seed) {
  RngStream rng(stream_key(seed, rng_tag::kData, 3));
  TwoMoonsData data;
  data.x.resize(n, 2);
  data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double t = std::numbers::pi * rng.uniform();
    double px, py;
    if (label == 0) {
      px = std::cos(t);
      py = std::sin(t);
    } else {
      px = 1.0 - std::cos(t);
      py = 0.5 - std::sin(t);
    }
    data.x(i, 0) = px + noise * rng.normal();
    data.x(i, 1) = py + noise * rng.normal();
    data.labels[i] = label;
  }
  return data;
}

}  // namespace jarzmle
