#pragma once

#include <Eigen/Dense>

namespace jarzmle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

}  // namespace jarzmle
