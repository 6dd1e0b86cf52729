#pragma once

#include <functional>
#include <string>

#include "lcbl/grid.hpp"

namespace lcbl {

/// A scalar test function with an optional analytic gradient.
struct TestFunction {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

TestFunction coordinate_function(int axis);
TestFunction linear_function(Vec coefficients, double offset = 0.0);
TestFunction constant_function(int n, double c);
/// x_axis^2 + shift.
TestFunction square_function(int axis, double shift = 0.0);
/// tanh(x_axis).
TestFunction tanh_function(int axis);
/// exp(c . x), positive.
TestFunction exp_linear_function(Vec coefficients);
/// 1 + a tanh(c . x), positive for |a| < 1.
TestFunction tilt_function(Vec coefficients, double amplitude);

Field sample(const TestFunction& fn, const GridPtr& grid);
/// Analytic gradient when available, otherwise central differences of value.
VectorField sample_gradient(const TestFunction& fn, const GridPtr& grid);

/// Finite-difference gradient of a field on a uniform grid, accuracy order 2
/// or 4 (one-sided near the boundary).
VectorField fd_gradient(const Field& f, int order = 4);

/// Central-difference gradient of a function at a point.
Vec numeric_gradient(const std::function<double(const Vec&)>& fn, const Vec& x);

}  // namespace lcbl
