#pragma once

#include <Eigen/Core>

namespace obf {

using Vector = Eigen::VectorXd;
// Column-major storage, so Eigen::Map over data() is vec(M).
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace obf
