#include "lcbl/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace lcbl {

SymEig sym_eig(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(a);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat spd_power(const SymEig& eig, double s) {
  Vec powered = eig.values.unaryExpr([s](double l) { return std::pow(l, s); });
  return eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
}

double relative_asymmetry(const Mat& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace lcbl
