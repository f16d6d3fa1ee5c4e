#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jarzmle/types.hpp"

namespace jarzmle {

// Feature table with its standardization record. Columns of `features` have
// zero mean and unit standard deviation under the recorded statistics;
// `raw_features` keeps the untransformed values so splits can restandardize
// with train statistics.
struct TabularDataset {
  Matrix features;
  Matrix raw_features;
  Vector targets;  // binary labels or regression targets
  Vector column_means;
  Vector column_stds;
  std::string std_divisor = "population";  // divisor n, recorded for reproducibility
  std::string split_tag = "full";

  Index n_rows() const { return features.rows(); }
  Index n_cols() const { return features.cols(); }
  Matrix destandardized() const;
};

// Standardize columns in place statistics; population divisor.
std::pair<Vector, Vector> column_stats(const Matrix& x);
Matrix apply_standardization(const Matrix& x, const Vector& means,
                             const Vector& stds);

// UCI original-format breast cancer file: id, nine integer features, class
// in {2, 4}, missing values as '?'. Rows containing '?' are dropped, class
// 2 maps to 0 and 4 to 1, features are standardized column-wise.
TabularDataset load_wisconsin(const std::string& path);

// Class-stratified split preserving per-class proportions to within one
// sample. Train columns are standardized on train statistics; the test
// side reuses those statistics.
std::pair<TabularDataset, TabularDataset> stratified_split(
    const TabularDataset& data, double fraction, std::uint64_t seed,
    std::vector<Index>* train_indices = nullptr,
    std::vector<Index>* test_indices = nullptr);

struct LinRegData {
  Matrix x;  // d_y x d_x, N(0, I) features
  Vector y;
  Vector w_true;
};

enum class ErrorKind { Gaussian, StudentT };

// y = X w* + eps with w* ~ N(0, alpha*^{-1} I); eps Gaussian with std
// sigma_star, or sigma_star-scaled Student-t with nu_star degrees of
// freedom drawn as normal / sqrt(chi2_nu / nu).
LinRegData gen_linreg_data(Index d_y, Index d_x, double alpha_star,
                           double sigma_star, ErrorKind error_kind,
                           double nu_star, std::uint64_t seed);

struct PolyData {
  Vector x;  // raw scalar inputs, U[-2.5, 2.5]
  Vector y;
  Vector w_true;  // length p_star + 1
};

PolyData gen_poly_data(Index d_y, int p_star, double alpha_star,
                       double sigma_sq_star, std::uint64_t seed);

struct TwoMoonsData {
  Matrix x;  // n x 2
  IntVector labels;
};

// Two interleaved half-circles with isotropic Gaussian jitter; the
// nonlinearly separable toy set used by the small network experiments.
TwoMoonsData gen_two_moons(Index n, double noise, std::uint64_t seed);

}  // namespace jarzmle
