#pragma once

#include <Eigen/Dense>

namespace seqcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace seqcs
