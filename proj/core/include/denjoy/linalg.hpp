#pragma once

#include <Eigen/Dense>

namespace denjoy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace denjoy
