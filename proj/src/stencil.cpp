#include "lcbl/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lcbl/error.hpp"

namespace lcbl {

std::vector<double> fd_weights(std::span<const double> offsets, int derivative) {
  const auto m = static_cast<Eigen::Index>(offsets.size());
  if (derivative < 0 || m <= derivative) {
    throw Error(ErrorKind::invalid_input, "stencil needs more points than the derivative order");
  }
  // Solve sum_j w_j s_j^k / k! = delta_{k,d} for k < m.
  Eigen::MatrixXd v(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    double factorial = 1.0;
    for (Eigen::Index f = 2; f <= k; ++f) factorial *= static_cast<double>(f);
    for (Eigen::Index j = 0; j < m; ++j) v(k, j) = std::pow(offsets[j], static_cast<double>(k)) / factorial;
  }
  rhs[derivative] = 1.0;
  const Eigen::VectorXd w = v.fullPivLu().solve(rhs);
  return {w.data(), w.data() + m};
}

Stencil derivative_stencil(std::size_t index, std::size_t count, int derivative, int order) {
  if (derivative != 1 && derivative != 2) {
    throw Error(ErrorKind::invalid_input, "only first and second derivative stencils exist");
  }
  if (order != 2 && order != 4) throw Error(ErrorKind::invalid_input, "stencil order must be 2 or 4");
  const long centered = order + 1;
  const long points = (derivative == 2 && count >= static_cast<std::size_t>(order + 2)) ? order + 2 : centered;
  if (count < static_cast<std::size_t>(centered)) {
    throw Error(ErrorKind::invalid_input,
                "axis with " + std::to_string(count) + " nodes is too short for the stencil");
  }
  const long half = order / 2;
  const long i = static_cast<long>(index);
  const long n = static_cast<long>(count);
  Stencil s;
  long first = i - half;
  long size = centered;
  if (first < 0 || first + centered > n) {
    s.one_sided = true;
    size = points;
    first = std::clamp(i - half, 0L, n - size);
  }
  std::vector<double> offs;
  for (long k = 0; k < size; ++k) {
    s.offsets.push_back(first + k - i);
    offs.push_back(static_cast<double>(first + k - i));
  }
  s.weights = fd_weights(offs, derivative);
  return s;
}

}  // namespace lcbl
