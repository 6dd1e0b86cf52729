#include "lcbl/field.hpp"

#include <cmath>
#include <sstream>

#include "lcbl/error.hpp"
#include "lcbl/stencil.hpp"

namespace lcbl {

TestFunction coordinate_function(int axis) {
  return {"x" + std::to_string(axis + 1), [axis](const Vec& x) { return x[axis]; },
          [axis](const Vec& x) {
            Vec g = Vec::Zero(x.size());
            g[axis] = 1.0;
            return g;
          }};
}

TestFunction linear_function(Vec coefficients, double offset) {
  std::ostringstream name;
  name << "linear[";
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) name << (i ? "," : "") << coefficients[i];
  name << "]";
  return {name.str(), [coefficients, offset](const Vec& x) { return coefficients.dot(x) + offset; },
          [coefficients](const Vec&) { return coefficients; }};
}

TestFunction constant_function(int n, double c) {
  return {"const", [c](const Vec&) { return c; }, [n](const Vec&) { return Vec(Vec::Zero(n)); }};
}

TestFunction square_function(int axis, double shift) {
  return {"x" + std::to_string(axis + 1) + "^2",
          [axis, shift](const Vec& x) { return x[axis] * x[axis] + shift; },
          [axis](const Vec& x) {
            Vec g = Vec::Zero(x.size());
            g[axis] = 2.0 * x[axis];
            return g;
          }};
}

TestFunction tanh_function(int axis) {
  return {"tanh(x" + std::to_string(axis + 1) + ")", [axis](const Vec& x) { return std::tanh(x[axis]); },
          [axis](const Vec& x) {
            Vec g = Vec::Zero(x.size());
            const double c = std::cosh(x[axis]);
            g[axis] = 1.0 / (c * c);
            return g;
          }};
}

TestFunction exp_linear_function(Vec coefficients) {
  std::ostringstream name;
  name << "exp[";
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) name << (i ? "," : "") << coefficients[i];
  name << "]";
  return {name.str(), [coefficients](const Vec& x) { return std::exp(coefficients.dot(x)); },
          [coefficients](const Vec& x) { return Vec(coefficients * std::exp(coefficients.dot(x))); }};
}

TestFunction tilt_function(Vec coefficients, double amplitude) {
  std::ostringstream name;
  name << "1+" << amplitude << "tanh[";
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) name << (i ? "," : "") << coefficients[i];
  name << "]";
  return {name.str(), [coefficients, amplitude](const Vec& x) { return 1.0 + amplitude * std::tanh(coefficients.dot(x)); },
          [coefficients, amplitude](const Vec& x) {
            const double c = std::cosh(coefficients.dot(x));
            return Vec(coefficients * (amplitude / (c * c)));
          }};
}

Field sample(const TestFunction& fn, const GridPtr& grid) {
  Field f{grid, std::vector<double>(grid->size())};
  for (std::size_t i = 0; i < grid->size(); ++i) f.values[i] = fn.value(grid->point(i));
  require_finite(f, fn.name.c_str());
  return f;
}

Vec numeric_gradient(const std::function<double(const Vec&)>& fn, const Vec& x) {
  Vec g(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    const double h = 1e-6 * (1.0 + std::abs(x[a]));
    Vec xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return g;
}

VectorField sample_gradient(const TestFunction& fn, const GridPtr& grid) {
  const int n = grid->dimension();
  VectorField v{grid, n, std::vector<double>(grid->size() * n)};
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec x = grid->point(i);
    const Vec g = fn.gradient ? fn.gradient(x) : numeric_gradient(fn.value, x);
    for (int a = 0; a < n; ++a) v.values[i * n + a] = g[a];
  }
  return v;
}

VectorField fd_gradient(const Field& f, int order) {
  const Grid& grid = *f.grid;
  if (!grid.uniform()) throw Error(ErrorKind::invalid_input, "finite differences need a uniform grid");
  const int n = grid.dimension();
  VectorField v{f.grid, n, std::vector<double>(grid.size() * n, 0.0)};
  for (int a = 0; a < n; ++a) {
    const Axis& ax = grid.axis(a);
    std::vector<Stencil> stencils;
    for (std::size_t k = 0; k < ax.size(); ++k) stencils.push_back(derivative_stencil(k, ax.size(), 1, order));
    const double inv_h = 1.0 / ax.spacing;
    const long stride = static_cast<long>(grid.stride(a));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Stencil& s = stencils[grid.index_along(i, a)];
      double d = 0.0;
      for (std::size_t k = 0; k < s.offsets.size(); ++k) {
        d += s.weights[k] * f.values[static_cast<std::size_t>(static_cast<long>(i) + s.offsets[k] * stride)];
      }
      v.values[i * n + a] = d * inv_h;
    }
  }
  return v;
}

}  // namespace lcbl
