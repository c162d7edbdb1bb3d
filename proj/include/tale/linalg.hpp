#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace tale {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Complex dimension of the common null space of the given square matrices.
int common_null_dimension(const std::vector<CMat>& blocks, double tol);

}  // namespace tale
