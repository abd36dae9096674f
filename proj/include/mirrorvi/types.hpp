#pragma once

#include <Eigen/Dense>

namespace mirrorvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace mirrorvi
