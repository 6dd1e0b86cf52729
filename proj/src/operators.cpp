#include "lcbl/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "lcbl/error.hpp"
#include "lcbl/parallel.hpp"
#include "lcbl/stencil.hpp"

namespace lcbl {

std::string_view to_string(StencilKind kind) noexcept {
  switch (kind) {
    case StencilKind::central2: return "central2";
    case StencilKind::central4: return "central4";
    case StencilKind::flux2: return "flux2";
  }
  return "unknown";
}

StencilKind stencil_from_string(const std::string& name) {
  if (name == "central2") return StencilKind::central2;
  if (name == "central4") return StencilKind::central4;
  if (name == "flux2") return StencilKind::flux2;
  throw Error(ErrorKind::config_error, "unknown stencil '" + name + "' (central2, central4, flux2)");
}

namespace {

void require_smooth_uniform(const Quadrature& q, const char* what) {
  if (!q.measure->is_smooth()) {
    throw Error(ErrorKind::unsupported_form, std::string(what) + " needs a smooth-potential measure");
  }
  if (!q.grid->uniform()) throw Error(ErrorKind::invalid_input, std::string(what) + " needs a uniform grid");
}

std::vector<double> node_gradients(const Quadrature& q) {
  const Grid& grid = *q.grid;
  const int n = grid.dimension();
  const Potential& p = q.measure->potential();
  std::vector<double> g(grid.size() * n);
  parallel_chunks(grid.size(), 512, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec gi = p.gradient(grid.point(i));
      for (int a = 0; a < n; ++a) g[i * n + a] = gi[a];
    }
  });
  return g;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

struct AxisStencils {
  std::vector<Stencil> d1, d2;
};

std::vector<AxisStencils> axis_stencils(const Grid& grid, int order) {
  std::vector<AxisStencils> out(grid.dimension());
  for (int a = 0; a < grid.dimension(); ++a) {
    const std::size_t len = grid.axis(a).size();
    for (std::size_t k = 0; k < len; ++k) {
      out[a].d1.push_back(derivative_stencil(k, len, 1, order));
      out[a].d2.push_back(derivative_stencil(k, len, 2, order));
    }
  }
  return out;
}

// Row i of the pointwise generator.
void pointwise_row(const Grid& grid, const std::vector<AxisStencils>& st, const std::vector<double>& grad,
                   std::size_t i, Triplets& out, bool& one_sided) {
  const int n = grid.dimension();
  for (int a = 0; a < n; ++a) {
    const std::size_t k = grid.index_along(i, a);
    const double h = grid.axis(a).spacing;
    const long stride = static_cast<long>(grid.stride(a));
    const Stencil& s2 = st[a].d2[k];
    const Stencil& s1 = st[a].d1[k];
    one_sided = one_sided || s1.one_sided || s2.one_sided;
    for (std::size_t t = 0; t < s2.offsets.size(); ++t) {
      out.emplace_back(static_cast<long>(i), static_cast<long>(i) + s2.offsets[t] * stride, s2.weights[t] / (h * h));
    }
    const double drift = -grad[i * n + a] / h;
    for (std::size_t t = 0; t < s1.offsets.size(); ++t) {
      out.emplace_back(static_cast<long>(i), static_cast<long>(i) + s1.offsets[t] * stride, drift * s1.weights[t]);
    }
  }
}

void flux_row(const Quadrature& q, std::size_t i, Triplets& out) {
  const Grid& grid = *q.grid;
  const Potential& p = q.measure->potential();
  const int n = grid.dimension();
  const Vec xi = grid.point(i);
  double diag = 0.0;
  for (int a = 0; a < n; ++a) {
    const Axis& ax = grid.axis(a);
    const std::size_t k = grid.index_along(i, a);
    const double scale = 1.0 / (ax.spacing * ax.weights[k]);
    for (int side : {-1, 1}) {
      if ((side < 0 && k == 0) || (side > 0 && k + 1 == ax.size())) continue;
      const std::size_t j = side > 0 ? i + grid.stride(a) : i - grid.stride(a);
      Vec mid = xi;
      mid[a] = 0.5 * (ax.nodes[k] + ax.nodes[side > 0 ? k + 1 : k - 1]);
      const double c = scale * std::exp(q.potential[i] - p.value(mid));
      out.emplace_back(static_cast<long>(i), static_cast<long>(j), c);
      diag -= c;
    }
  }
  out.emplace_back(static_cast<long>(i), static_cast<long>(i), diag);
}

bool on_face(const Grid& grid, std::size_t i, int* axis_out) {
  for (int a = 0; a < grid.dimension(); ++a) {
    const std::size_t k = grid.index_along(i, a);
    if (k == 0 || k + 1 == grid.axis(a).size()) {
      if (axis_out) *axis_out = a;
      return true;
    }
  }
  return false;
}

}  // namespace

GeneratorMatrix assemble_generator(const Quadrature& q, StencilKind kind) {
  require_smooth_uniform(q, "generator assembly");
  const Grid& grid = *q.grid;
  const std::size_t size = grid.size();
  GeneratorMatrix g;
  g.kind = kind;
  g.one_sided.assign(size, 0);
  Triplets triplets;
  if (kind == StencilKind::flux2) {
    g.closure = "natural-flux";
    for (std::size_t i = 0; i < size; ++i) flux_row(q, i, triplets);
  } else {
    g.closure = "one-sided";
    const auto st = axis_stencils(grid, kind == StencilKind::central4 ? 4 : 2);
    const auto grad = node_gradients(q);
    for (std::size_t i = 0; i < size; ++i) {
      bool one_sided = false;
      pointwise_row(grid, st, grad, i, triplets, one_sided);
      g.one_sided[i] = one_sided ? 1 : 0;
    }
  }
  g.matrix.resize(static_cast<long>(size), static_cast<long>(size));
  g.matrix.setFromTriplets(triplets.begin(), triplets.end());
  g.matrix.makeCompressed();
  return g;
}

GeneratorResult apply_generator(const Quadrature& q, const Field& h, StencilKind kind) {
  if (h.values.size() != q.size()) throw Error(ErrorKind::invalid_input, "field size differs from the grid");
  const GeneratorMatrix g = assemble_generator(q, kind);
  Eigen::Map<const Vec> hv(h.values.data(), static_cast<long>(h.values.size()));
  const Vec lh = g.matrix * hv;
  GeneratorResult r{Field{q.grid, std::vector<double>(lh.data(), lh.data() + lh.size())}, 0};
  for (char c : g.one_sided) r.one_sided_nodes += c ? 1 : 0;
  return r;
}

PoissonSolution solve_poisson(const Quadrature& q, const Field& h, const PoissonOptions& opts) {
  require_smooth_uniform(q, "solve_poisson");
  if (h.values.size() != q.size()) throw Error(ErrorKind::invalid_input, "field size differs from the grid");
  require_finite(h, "solve_poisson right-hand side");
  const Grid& grid = *q.grid;
  const std::size_t size = grid.size();
  const long border = static_cast<long>(size);
  const double total_mass = pairwise_sum(q.mass);
  const double mean_h = integrate(h, q) / total_mass;

  Triplets triplets;
  std::vector<char> neumann(size, 0);
  if (opts.stencil == StencilKind::flux2) {
    for (std::size_t i = 0; i < size; ++i) flux_row(q, i, triplets);
  } else {
    const int order = opts.stencil == StencilKind::central4 ? 4 : 2;
    const auto st = axis_stencils(grid, order);
    const auto grad = node_gradients(q);
    for (std::size_t i = 0; i < size; ++i) {
      int axis = -1;
      if (on_face(grid, i, &axis)) {
        neumann[i] = 1;
        const Stencil& s1 = st[axis].d1[grid.index_along(i, axis)];
        const long stride = static_cast<long>(grid.stride(axis));
        for (std::size_t t = 0; t < s1.offsets.size(); ++t) {
          triplets.emplace_back(static_cast<long>(i), static_cast<long>(i) + s1.offsets[t] * stride, s1.weights[t]);
        }
      } else {
        bool one_sided = false;
        pointwise_row(grid, st, grad, i, triplets, one_sided);
      }
    }
  }
  Vec rhs = Vec::Zero(border + 1);
  for (std::size_t i = 0; i < size; ++i) {
    if (neumann[i]) continue;
    triplets.emplace_back(static_cast<long>(i), border, 1.0);
    rhs[static_cast<long>(i)] = h.values[i] - mean_h;
  }
  for (std::size_t i = 0; i < size; ++i) triplets.emplace_back(border, static_cast<long>(i), q.mass[i] / total_mass);

  Eigen::SparseMatrix<double> a(border + 1, border + 1);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  const double rhs_norm = std::max(rhs.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
  PoissonSolution sol;
  sol.boundary = opts.stencil == StencilKind::flux2 ? "natural-flux" : "neumann-one-sided";
  Vec x;
  Vec r;
  if (size <= opts.direct_limit) {
    sol.method = std::string("sparse-lu/") + std::string(to_string(opts.stencil));
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::solver_failure,
                  "Poisson system is singular (spectral gap numerically zero); regularize the potential "
                  "with a small eps|x|^2 and retry");
    }
    x = lu.solve(rhs);
    r = rhs - a * x;
    for (int step = 0; step < opts.max_refinements && r.lpNorm<Eigen::Infinity>() > 1e-3 * opts.tolerance * rhs_norm;
         ++step) {
      x += lu.solve(r);
      r = rhs - a * x;
      sol.refinements = step + 1;
    }
  } else {
    sol.method = std::string("bicgstab-ilut/") + std::string(to_string(opts.stencil));
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.preconditioner().setDroptol(1e-3);
    solver.preconditioner().setFillfactor(2);
    solver.setTolerance(1e-3 * opts.tolerance);
    solver.setMaxIterations(opts.max_iterations);
    solver.compute(a);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::solver_failure, "Poisson preconditioner setup failed; regularize the potential and retry");
    }
    x = solver.solve(rhs);
    r = rhs - a * x;
    sol.refinements = static_cast<int>(solver.iterations());
  }
  sol.system_residual = r.lpNorm<Eigen::Infinity>() / rhs_norm;
  if (!x.allFinite() || sol.system_residual > opts.tolerance) {
    throw Error(ErrorKind::solver_failure,
                "Poisson solve did not reach tolerance (relative residual " + std::to_string(sol.system_residual) +
                    "); regularize the potential with a small eps|x|^2 and retry");
  }
  sol.compatibility = x[border];
  std::vector<double> u(x.data(), x.data() + size);
  double mean_u = 0.0;
  for (std::size_t i = 0; i < size; ++i) mean_u += q.mass[i] * u[i];
  mean_u /= total_mass;
  for (double& v : u) v -= mean_u;
  sol.u = Field{q.grid, std::move(u)};

  // Residual of the discrete operator on the equation rows.
  Eigen::Map<const Vec> uv(sol.u.values.data(), border);
  const Vec lu_u = a.topLeftCorner(border, border) * uv;
  double residual = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    if (neumann[i]) continue;
    residual = std::max(residual, std::abs(lu_u[static_cast<long>(i)] - rhs[static_cast<long>(i)]));
  }
  sol.residual = residual;
  return sol;
}

PoissonSolution solve_poisson_1d_exact(const Quadrature& q, const Field& h) {
  require_smooth_uniform(q, "solve_poisson_1d_exact");
  if (q.dimension() != 1) throw Error(ErrorKind::invalid_dimension, "the quadrature solver is 1-D only");
  if (h.values.size() != q.size()) throw Error(ErrorKind::invalid_input, "field size differs from the grid");
  const Axis& ax = q.grid->axis(0);
  const std::size_t n = ax.size();
  const double dx = ax.spacing;
  const double total_mass = pairwise_sum(q.mass);
  const double mean_h = integrate(h, q) / total_mass;
  const auto grad = node_gradients(q);

  const Potential& p = q.measure->potential();
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = h.values[i] - mean_h;

  // Cubic Lagrange interpolation of h - <h> inside cell [x_i, x_{i+1}].
  auto interp = [&](std::size_t i, double t) {
    const long first = std::clamp(static_cast<long>(i) - 1, 0L, static_cast<long>(n) - 4);
    const double s = (t - ax.nodes[static_cast<std::size_t>(first)]) / dx;
    double value = 0.0;
    for (long k = 0; k < 4; ++k) {
      double basis = 1.0;
      for (long m = 0; m < 4; ++m) {
        if (m != k) basis *= (s - static_cast<double>(m)) / static_cast<double>(k - m);
      }
      value += basis * centered[static_cast<std::size_t>(first + k)];
    }
    return value;
  };
  // int_{x_i}^{x_{i+1}} e^{f(s) - f_anchor} c(s) ds by 8-point Gauss-Legendre.
  static constexpr double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
  static constexpr double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                   0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
  Vec point(1);
  auto cell_integral = [&](std::size_t i, double anchor) {
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double t = ax.nodes[i] + 0.5 * dx * (gx[k] + 1.0);
      point[0] = t;
      acc += gw[k] * std::exp(anchor - p.value(point)) * interp(i, t);
    }
    return 0.5 * dx * acc;
  };

  // v = u' solves v' = f'v + (h - <h>); sweep toward the minimum of f from each
  // end so the propagation factor e^{f_i - f_j} never exceeds one.
  std::size_t mode = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (q.potential[i] < q.potential[mode]) mode = i;
  }
  PoissonSolution sol;
  sol.boundary = "natural";
  sol.method = "quadrature-1d";
  std::vector<double> du(n, 0.0), ddu(n, 0.0);
  for (std::size_t i = 0; i < mode; ++i) {
    du[i + 1] = std::exp(q.potential[i + 1] - q.potential[i]) * du[i] + cell_integral(i, q.potential[i + 1]);
  }
  std::vector<double> from_right(n, 0.0);
  for (std::size_t i = n - 1; i > mode; --i) {
    from_right[i - 1] = std::exp(q.potential[i - 1] - q.potential[i]) * from_right[i] -
                        cell_integral(i - 1, q.potential[i - 1]);
  }
  for (std::size_t i = mode + 1; i < n; ++i) du[i] = from_right[i];
  for (std::size_t i = 0; i < n; ++i) ddu[i] = grad[i] * du[i] + centered[i];
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    u[i + 1] = u[i] + 0.5 * dx * (du[i] + du[i + 1]) - dx * dx / 12.0 * (ddu[i + 1] - ddu[i]);
  }
  double mean_u = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_u += q.mass[i] * u[i];
  mean_u /= total_mass;
  for (double& v : u) v -= mean_u;

  // Residual u'' - f'u' - (h - <h>) with u'' from fourth-order differences of u',
  // over nodes outside the far tails where the boundary layer of u' sits.
  Field du_field{q.grid, du};
  const VectorField d2u = fd_gradient(du_field, 4);
  const double floor = 1e-6 * q.max_density();
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q.mass[i] / q.grid->weight(i) <= floor) continue;
    residual = std::max(residual, std::abs(d2u.values[i] - grad[i] * du[i] - centered[i]));
  }
  sol.residual = residual;
  sol.u = Field{q.grid, std::move(u)};
  return sol;
}

double check_commutation(const Quadrature& q, const Field& u, const std::optional<Box>& region) {
  require_smooth_uniform(q, "check_commutation");
  const Grid& grid = *q.grid;
  const int n = grid.dimension();
  const Potential& p = q.measure->potential();
  const GeneratorMatrix g = assemble_generator(q, StencilKind::central2);
  const long size = static_cast<long>(grid.size());
  Eigen::Map<const Vec> uv(u.values.data(), size);
  const Vec lu = g.matrix * uv;
  const VectorField grad_u = fd_gradient(u, 2);
  const VectorField grad_lu = fd_gradient(Field{q.grid, std::vector<double>(lu.data(), lu.data() + size)}, 2);
  std::vector<Vec> l_grad(n);
  for (int a = 0; a < n; ++a) {
    const Field c = grad_u.component(a);
    l_grad[a] = g.matrix * Eigen::Map<const Vec>(c.values.data(), size);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool interior = true;
    for (int a = 0; a < n && interior; ++a) {
      const std::size_t k = grid.index_along(i, a);
      interior = k >= 2 && k + 2 < grid.axis(a).size();
    }
    if (!interior) continue;
    const Vec x = grid.point(i);
    if (region && !region->contains(std::span<const double>(x.data(), static_cast<std::size_t>(n)))) continue;
    Vec gu(n);
    for (int a = 0; a < n; ++a) gu[a] = grad_u.values[i * n + a];
    const Vec hg = p.hessian(x) * gu;
    for (int a = 0; a < n; ++a) {
      const double r = l_grad[a][static_cast<long>(i)] - grad_lu.values[i * n + a] - hg[a];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

SpectralField::SpectralField(const Quadrature& q) : n_(q.dimension()) {
  if (!q.measure->is_smooth()) {
    throw Error(ErrorKind::unsupported_form, "Hessian weights need a smooth-potential measure");
  }
  const Grid& grid = *q.grid;
  const Potential& p = q.measure->potential();
  const std::size_t size = grid.size();
  lmin_.resize(size);
  lmax_.resize(size);
  values_.resize(size * n_);
  vectors_.resize(size * n_ * n_);
  parallel_chunks(size, 256, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Mat hess = p.hessian(grid.point(i));
      const SymEig eig = sym_eig(hess);
      lmin_[i] = eig.values[0];
      lmax_[i] = eig.values[n_ - 1];
      for (int a = 0; a < n_; ++a) values_[i * n_ + a] = eig.values[a];
      for (int c = 0; c < n_; ++c) {
        for (int r = 0; r < n_; ++r) vectors_[i * n_ * n_ + c * n_ + r] = eig.vectors(r, c);
      }
    }
  });
  for (std::size_t i = 0; i < size; ++i) {
    if (!(lmin_[i] > kMinEigenvalue)) {
      const Vec x = grid.point(i);
      std::string where = "(";
      for (int a = 0; a < n_; ++a) where += (a ? ", " : "") + std::to_string(x[a]);
      throw Error(ErrorKind::convexity_violation,
                  "Hessian least eigenvalue " + std::to_string(lmin_[i]) + " <= 1e-12 at node " +
                      std::to_string(i) + " x = " + where + ")");
    }
  }
}

void SpectralField::apply_power(std::size_t i, std::span<const double> v, double power, std::span<double> out) const {
  const double* q = vectors_.data() + i * n_ * n_;
  const double* lam = values_.data() + i * n_;
  double coeff[16];
  for (int c = 0; c < n_; ++c) {
    double dot = 0.0;
    for (int r = 0; r < n_; ++r) dot += q[c * n_ + r] * v[r];
    coeff[c] = dot * (power == 0.0 ? 1.0 : std::pow(lam[c], power));
  }
  for (int r = 0; r < n_; ++r) {
    double s = 0.0;
    for (int c = 0; c < n_; ++c) s += q[c * n_ + r] * coeff[c];
    out[r] = s;
  }
}

double SpectralField::power_norm(std::size_t i, std::span<const double> v, double power) const {
  double out[16];
  apply_power(i, v, power, std::span<double>(out, static_cast<std::size_t>(n_)));
  double s = 0.0;
  for (int a = 0; a < n_; ++a) s += out[a] * out[a];
  return std::sqrt(s);
}

double SpectralField::max_condition() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < lmin_.size(); ++i) worst = std::max(worst, lmax_[i] / lmin_[i]);
  return worst;
}

const SpectralField& spectrum_of(const Quadrature& q) {
  std::lock_guard lock(*q.cache_mutex);
  if (!q.spectral_cache) q.spectral_cache = std::make_shared<const SpectralField>(q);
  return *q.spectral_cache;
}

QuadraturePtr coarsened(const QuadraturePtr& q, std::size_t limit) {
  if (q->size() <= limit) return q;
  if (!q->measure->is_smooth()) throw Error(ErrorKind::unsupported_form, "coarsening needs a smooth measure");
  const int n = q->dimension();
  auto nodes = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(limit), 1.0 / n) + 1e-9));
  if (nodes % 2 == 0) --nodes;
  nodes = std::max<std::size_t>(nodes, kMinNodesPerAxis + 1);
  return box_quadrature(q->measure->potential_ptr(), q->grid->bounds(), nodes);
}

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

double weighted_gradient_norm(const Quadrature& q, const SpectralField& spec, const VectorField& v,
                              const WeightedNorm& norm) {
  const int n = q.dimension();
  if (v.components != n || v.values.size() != q.size() * static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::invalid_input, "vector field does not match the grid");
  }
  if (!(norm.p >= 1.0)) throw Error(ErrorKind::domain_error, "norm exponent must be >= 1");
  const std::size_t size = q.size();
  auto integrand = [&](std::size_t i) {
    const double base = spec.power_norm(i, v.at(i), norm.power);
    return norm.lam_exponent == 0.0 ? base : std::pow(spec.lambda_min(i), norm.lam_exponent) * base;
  };
  if (std::isinf(norm.p)) {
    const double floor = kEssentialDensityFloor * q.max_density();
    double sup = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      if (q.mass[i] / q.grid->weight(i) > floor) sup = std::max(sup, integrand(i));
    }
    return sup;
  }
  std::vector<double> terms(size);
  for (std::size_t i = 0; i < size; ++i) terms[i] = q.mass[i] * std::pow(integrand(i), norm.p);
  return std::pow(pairwise_sum(terms), 1.0 / norm.p);
}

}  // namespace lcbl
