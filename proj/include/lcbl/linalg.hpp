#pragma once

#include <Eigen/Dense>

namespace lcbl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Symmetric eigendecomposition, eigenvalues ascending, columns orthonormal.
struct SymEig {
  Vec values;
  Mat vectors;
};

SymEig sym_eig(const Mat& a);

/// Q diag(lambda^s) Q^T for a decomposition with positive eigenvalues.
Mat spd_power(const SymEig& eig, double s);

/// max |a_ij - a_ji| / max(1, max |a_ij|)
double relative_asymmetry(const Mat& a);

}  // namespace lcbl
