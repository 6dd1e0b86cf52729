#include "lcbl/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "lcbl/error.hpp"
#include "lcbl/kernels.hpp"
#include "lcbl/parallel.hpp"

namespace lcbl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << p;
  return os.str();
}

Json grid_meta(const Quadrature& q) {
  Json g;
  Json nodes = Json::array();
  Json lo = Json::array();
  Json hi = Json::array();
  for (int a = 0; a < q.dimension(); ++a) {
    nodes.push_back(q.grid->axis(a).size());
    lo.push_back(q.grid->axis(a).lo);
    hi.push_back(q.grid->axis(a).hi);
  }
  g["nodes_per_axis"] = nodes;
  g["box_lo"] = lo;
  g["box_hi"] = hi;
  g["rule"] = q.grid->uniform() ? "trapezoid" : "gauss-legendre";
  Json m;
  m["measure"] = q.measure->name();
  m["grid"] = g;
  m["normalization_residual"] = number(q.measure->normalization_residual());
  if (q.measure->is_smooth() && q.measure->potential().fd_hessian()) m["hessian"] = "FD-Hessian";
  return m;
}

std::vector<char> essential_nodes(const Quadrature& q) {
  const double floor = kEssentialDensityFloor * q.max_density();
  std::vector<char> keep(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) keep[i] = q.mass[i] / q.grid->weight(i) > floor ? 1 : 0;
  return keep;
}

double gradient_l1(const Quadrature& q, const VectorField& v) {
  std::vector<double> t(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double s = 0.0;
    for (double c : v.at(i)) s += c * c;
    t[i] = q.mass[i] * std::sqrt(s);
  }
  return pairwise_sum(t);
}

// ess sup |grad h| / lambda_min from the Hessian's least eigenvalue.
double sup_gradient_over_lambda(const Quadrature& q, const VectorField& v) {
  const SpectralField& spec = spectrum_of(q);
  const auto keep = essential_nodes(q);
  double sup = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!keep[i]) continue;
    double s = 0.0;
    for (double c : v.at(i)) s += c * c;
    sup = std::max(sup, std::sqrt(s) / spec.lambda_min(i));
  }
  return sup;
}

void require_smooth(const Quadrature& q, const char* what) {
  if (!q.measure->is_smooth()) {
    throw Error(ErrorKind::unsupported_form, std::string(what) + " needs a smooth-potential measure");
  }
}

}  // namespace

double covariance(const Quadrature& q, const Field& g, const Field& h) {
  if (g.values.size() != q.size() || h.values.size() != q.size()) {
    throw Error(ErrorKind::invalid_input, "fields do not match the grid");
  }
  const double total = pairwise_sum(q.mass);
  const double mg = integrate(g, q) / total;
  const double mh = integrate(h, q) / total;
  std::vector<double> t(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) t[i] = (g.values[i] - mg) * (h.values[i] - mh);
  return integrate(t, q) / total;
}

InequalityReport verify_bl_variance(const QuadraturePtr& q, const TestFunction& h, const VerifyOptions& opts) {
  require_smooth(*q, "verify_bl_variance");
  const Field hf = sample(h, q->grid);
  const VectorField dh = sample_gradient(h, q->grid);
  const double var = covariance(*q, hf, hf);
  const double norm = weighted_gradient_norm(*q, spectrum_of(*q), dh, {2.0, -0.5, 0.0});
  InequalityReport r = make_report("BL-var", "h = " + h.name + " on " + q->measure->name(), q->dimension(), var,
                                   norm * norm, opts.tol);
  r.p = 2.0;
  r.q = 2.0;
  r.meta = grid_meta(*q);
  return r;
}

InequalityReport verify_dual_estimate(const QuadraturePtr& q_in, const TestFunction& g, const TestFunction& h,
                                      double p, const VerifyOptions& opts) {
  require_smooth(*q_in, "verify_dual_estimate");
  if (p < 2.0) throw Error(ErrorKind::domain_error, "the dual estimate needs 2 <= p <= inf, got p = " + format_p(p));
  const QuadraturePtr q = coarsened(q_in, opts.poisson_node_limit);
  const Field hf = sample(h, q->grid);
  const Field gf = sample(g, q->grid);
  const VectorField dh = sample_gradient(h, q->grid);
  const VectorField dg = sample_gradient(g, q->grid);
  const PoissonSolution sol = solve_poisson(*q, hf, opts.poisson);
  const VectorField du = fd_gradient(sol.u, 4);
  const SpectralField& spec = spectrum_of(*q);
  const bool inf = std::isinf(p);
  const double lhs = weighted_gradient_norm(*q, spec, du, {p, inf ? 0.0 : 1.0 / p, 0.0});
  const double rhs = weighted_gradient_norm(*q, spec, dh, {p, inf ? 0.0 : -1.0 / p, inf ? -1.0 : (2.0 - p) / p});
  InequalityReport r = make_report("cobo7", "u solves Lu = h - <h>, h = " + h.name + " on " + q->measure->name(),
                                   q->dimension(), lhs, rhs, opts.tol);
  r.p = p;
  r.q = conjugate_exponent(p);

  std::vector<double> t(q->size());
  const int n = q->dimension();
  for (std::size_t i = 0; i < q->size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += dg.values[i * n + a] * du.values[i * n + a];
    t[i] = s;
  }
  const double dual = -integrate(t, *q) / pairwise_sum(q->mass);
  const double cov = covariance(*q, gf, hf);
  r.meta = grid_meta(*q);
  r.meta["poisson"] = {{"method", sol.method},
                       {"boundary", sol.boundary},
                       {"residual", number(sol.residual)},
                       {"compatibility", number(sol.compatibility)},
                       {"system_residual", number(sol.system_residual)},
                       {"steps", sol.refinements}};
  r.meta["dual_identity"] = {{"cov", number(cov)},
                             {"minus_grad_g_dot_grad_u", number(dual)},
                             {"relative_error", number(std::abs(cov - dual) / std::max(std::abs(cov), 1e-300))}};
  return r;
}

InequalityReport verify_asym(const QuadraturePtr& q, const TestFunction& g, const TestFunction& h, double p,
                             const VerifyOptions& opts) {
  require_smooth(*q, "verify_asym");
  if (!(p >= 2.0)) {
    throw Error(ErrorKind::domain_error, "the asymmetric inequality needs 2 <= p <= inf, got p = " + format_p(p));
  }
  const int n = q->dimension();
  const bool inf = std::isinf(p);
  const double qe = conjugate_exponent(p);
  const Field gf = sample(g, q->grid);
  const Field hf = sample(h, q->grid);
  const VectorField dg = sample_gradient(g, q->grid);
  const VectorField dh = sample_gradient(h, q->grid);
  const SpectralField& spec = spectrum_of(*q);
  const double cov = covariance(*q, gf, hf);
  const double power = inf ? 0.0 : -1.0 / p;
  const double first = weighted_gradient_norm(*q, spec, dg, {qe, power, 0.0});
  const double second = weighted_gradient_norm(*q, spec, dh, {p, power, inf ? -1.0 : (2.0 - p) / p});
  const std::string label = "g = " + g.name + ", h = " + h.name + " on " + q->measure->name();
  InequalityReport r = make_report("BL4", label, n, std::abs(cov), first * second, opts.tol);
  r.p = p;
  r.q = qe;
  r.meta = grid_meta(*q);
  r.meta["cov"] = number(cov);
  r.meta["norm_g"] = number(first);
  r.meta["norm_h"] = number(second);
  if (static_cast<double>(q->size()) * static_cast<double>(q->size()) <= kPairBudget) {
    const double cov2 = covariance_pairwise(*q, gf, hf) / std::pow(pairwise_sum(q->mass), 2);
    r.meta["cov_pairwise"] = number(cov2);
    r.meta["cov_pairwise_relative_error"] = number(std::abs(cov2 - cov) / std::max(std::abs(cov), 1e-300));
  }

  {
    const double c1 = weighted_gradient_norm(*q, spec, dg, {qe, 0.0, inf ? 0.0 : -1.0 / p});
    const double c2 = weighted_gradient_norm(*q, spec, dh, {p, 0.0, -1.0 / qe});
    InequalityReport c = make_report("corollary-lam", label, n, std::abs(cov), c1 * c2, opts.tol);
    c.p = p;
    c.q = qe;
    r.sub_reports.push_back(std::move(c));
  }
  if (p == 2.0) {
    // Quadratic forms through a Cholesky solve, independent of the eigen path.
    const Potential& pot = q->measure->potential();
    std::vector<double> tg(q->size()), th(q->size());
    parallel_chunks(q->size(), 256, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const Eigen::LDLT<Mat> ldlt(pot.hessian(q->grid->point(i)));
        const Vec vg = Eigen::Map<const Vec>(dg.at(i).data(), n);
        const Vec vh = Eigen::Map<const Vec>(dh.at(i).data(), n);
        tg[i] = vg.dot(ldlt.solve(vg));
        th[i] = vh.dot(ldlt.solve(vh));
      }
    });
    const double a = integrate(tg, *q);
    const double b = integrate(th, *q);
    InequalityReport c = make_report("BL2", label, n, std::abs(cov), std::sqrt(a * b), opts.tol);
    c.p = 2.0;
    c.q = 2.0;
    c.meta["cov_squared"] = number(cov * cov);
    c.meta["product"] = number(a * b);
    r.sub_reports.push_back(std::move(c));
  }
  if (inf) {
    const double rhs = gradient_l1(*q, dg) * sup_gradient_over_lambda(*q, dh);
    InequalityReport c = make_report("BL4.2", label, n, std::abs(cov), rhs, opts.tol);
    c.p = p;
    c.q = 1.0;
    r.sub_reports.push_back(std::move(c));
  }
  r.sub_reports.push_back(verify_dual_estimate(q, g, h, p, opts));
  return r;
}

InequalityReport verify_divided_difference(const MeasurePtr& m, const QuadraturePtr& q, const TestFunction& h,
                                           const VerifyOptions& opts) {
  const int n = m->dimension();
  const double scale = std::ldexp(1.0, n);
  const std::string label = "h = " + h.name + " on " + m->name();
  const bool mc = opts.monte_carlo || n >= 4 || !q;
  if (mc) {
    const Sampler sampler(m, q);
    const MonteCarloEstimate est = divided_difference_mc(sampler, h, scale, opts.mc);
    InequalityReport r;
    r.name = "t1";
    r.label = label;
    r.n = n;
    r.lhs = est.lhs;
    r.rhs = est.rhs;
    r.tol = opts.tol;
    r.sigma = est.ratio_sigma;
    judge(r);
    r.meta["mode"] = "field";
    r.meta["method"] = "monte-carlo";
    r.meta["sampler"] = est.sampler;
    r.meta["samples"] = est.samples;
    r.meta["seed"] = *opts.mc.seed;
    r.meta["ratio_sigma"] = number(est.ratio_sigma);
    r.meta["ci95"] = {number(est.ratio - 1.96 * est.ratio_sigma), number(est.ratio + 1.96 * est.ratio_sigma)};
    return r;
  }
  const Field hf = sample(h, q->grid);
  const VectorField dh = sample_gradient(h, q->grid);
  const double lhs = divided_difference_field(*q, hf, dh);
  const double grad = gradient_l1(*q, dh);
  InequalityReport r = make_report("t1", label, n, lhs, scale * grad, opts.tol);
  r.meta = grid_meta(*q);
  r.meta["mode"] = "field";
  r.meta["method"] = "node-pair-quadrature";
  r.meta["kernel"] = std::string(active_kernels().name);
  r.meta["gradient_integral"] = number(grad);
  return r;
}

InequalityReport verify_divided_difference_set(const MeasurePtr& m, const SetSpec& set, const QuadraturePtr& q,
                                               std::size_t cells, const VerifyOptions& opts) {
  const int n = m->dimension();
  const double scale = std::ldexp(1.0, n);
  double lhs = 0.0;
  double boundary = 0.0;
  Json meta;
  if (set.kind == SetSpec::Kind::halfspace) {
    if (!q) throw Error(ErrorKind::invalid_input, "halfspace sets need a node grid");
    if (set.direction.size() != n) throw Error(ErrorKind::invalid_dimension, "halfspace direction has the wrong size");
    std::vector<char> in(q->size());
    for (std::size_t i = 0; i < q->size(); ++i) in[i] = set.contains(q->grid->point(i)) ? 1 : 0;
    lhs = divided_difference_set_nd(*q, in);
    boundary = hyperplane_density(*m, set.direction, set.a);
    meta = grid_meta(*q);
    meta["method"] = "node-pair-quadrature";
  } else {
    if (n != 1) throw Error(ErrorKind::mode_error, "half-lines and intervals are 1-D sets");
    const CellGrid1D grid = cell_grid_1d(*m, cells, set.boundary_points());
    const auto in = cells_in_set(grid, set);
    lhs = set_divided_difference_1d(grid, in);
    boundary = set_boundary_1d(*m, grid, in);
    meta["measure"] = m->name();
    meta["cells"] = grid.size();
    meta["method"] = "exact-cell-pairs";
  }
  InequalityReport r = make_report("t1", "indicator of " + set.describe() + " on " + m->name(), n, lhs,
                                   scale * boundary, opts.tol);
  r.meta = meta;
  r.meta["mode"] = "characteristic";
  r.meta["boundary_integral"] = number(boundary);
  r.meta["ratio_without_factor"] = number(boundary > 0.0 ? lhs / boundary : (lhs > 0.0 ? kInf : 1.0));
  r.meta["divergent"] = boundary == 0.0 && lhs > 0.0;
  return r;
}

InequalityReport verify_cov6(const QuadraturePtr& q, const TestFunction& g, const TestFunction& h,
                             const VerifyOptions& opts) {
  require_smooth(*q, "verify_cov6");
  const int n = q->dimension();
  const Field gf = sample(g, q->grid);
  const Field hf = sample(h, q->grid);
  const VectorField dg = sample_gradient(g, q->grid);
  const VectorField dh = sample_gradient(h, q->grid);
  const double cov = covariance(*q, gf, hf);
  const double c = sup_gradient_over_lambda(*q, dh);
  const double grad = gradient_l1(*q, dg);
  double divdiff = 0.0;
  if (n > 1) {
    const QuadraturePtr qd = coarsened(q, static_cast<std::size_t>(std::sqrt(kPairBudget)));
    divdiff = divided_difference_field(*qd, sample(g, qd->grid), sample_gradient(g, qd->grid));
  }
  InequalityReport r = make_report("cov6", "g = " + g.name + ", h = " + h.name + " on " + q->measure->name(), n,
                                   std::abs(cov), c * (grad + (n - 1) * divdiff), opts.tol);
  r.meta = grid_meta(*q);
  r.meta["C"] = number(c);
  r.meta["gradient_integral"] = number(grad);
  r.meta["divided_difference"] = number(divdiff);
  return r;
}

InequalityReport verify_layer_cake(const QuadraturePtr& q, const TestFunction& h, std::size_t levels,
                                   const VerifyOptions& opts) {
  if (levels < 64) throw Error(ErrorKind::invalid_input, "layer-cake check needs at least 64 levels");
  const Field hf = sample(h, q->grid);
  double top = 0.0;
  for (double v : hf.values) {
    if (v < -1e-12) throw Error(ErrorKind::invalid_input, "layer-cake check needs a nonnegative h");
    top = std::max(top, v);
  }
  const std::size_t size = q->size();
  if (static_cast<double>(size) * static_cast<double>(size) > kPairBudget) {
    throw Error(ErrorKind::budget_exceeded, "layer-cake check exceeds the pair budget");
  }
  // Level bands at mass quantiles of h; t_k is the band midpoint. A pair
  // contributes the total width of the bands whose midpoint lies between its
  // two values, which is |T(h_i) - T(h_j)|.
  std::vector<std::size_t> order(size);
  for (std::size_t i = 0; i < size; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hf.values[a] < hf.values[b]; });
  std::vector<double> edges{0.0};
  {
    const double total = pairwise_sum(q->mass);
    double acc = 0.0;
    std::size_t k = 1;
    for (std::size_t idx : order) {
      acc += q->mass[idx];
      while (k < levels && acc >= total * static_cast<double>(k) / static_cast<double>(levels)) {
        const double v = std::max(hf.values[idx], 0.0);
        if (v > edges.back()) edges.push_back(v);
        ++k;
      }
    }
    if (top > edges.back()) edges.push_back(top);
  }
  std::vector<double> mids, cumulative{0.0};
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    mids.push_back(0.5 * (edges[k] + edges[k + 1]));
    cumulative.push_back(cumulative.back() + edges[k + 1] - edges[k]);
  }
  auto band = [&](double v) {
    return static_cast<std::size_t>(std::lower_bound(mids.begin(), mids.end(), v) - mids.begin());
  };
  auto band_width = [&](double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - edges.begin()), 1, edges.size() - 1);
    return edges[k] - edges[k - 1];
  };
  // |T(v) - v| <= w(v)/2, so the t-quadrature error of a pair is at most
  // (w_i + w_j)/2.
  const int n = q->dimension();
  const std::vector<std::vector<double>> coords = q->grid->coordinates_soa();
  std::vector<double> t_of(size), width(size);
  for (std::size_t i = 0; i < size; ++i) {
    t_of[i] = cumulative[band(hf.values[i])];
    width[i] = band_width(hf.values[i]);
  }
  std::vector<double> direct(size), layered(size), bound(size);
  parallel_chunks(size, 32, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double d_acc = 0.0, l_acc = 0.0, b_acc = 0.0;
      for (std::size_t j = 0; j < size; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double d = coords[a][i] - coords[a][j];
          d2 += d * d;
        }
        const double w = q->mass[j] / std::sqrt(d2);
        d_acc += w * std::abs(hf.values[i] - hf.values[j]);
        l_acc += w * std::abs(t_of[i] - t_of[j]);
        b_acc += w;
      }
      direct[i] = q->mass[i] * d_acc;
      layered[i] = q->mass[i] * l_acc;
      bound[i] = q->mass[i] * width[i] * b_acc;
    }
  });
  const double lhs = pairwise_sum(direct);
  const double rhs = pairwise_sum(layered);
  const double err = pairwise_sum(bound);
  const double tol = std::max(opts.tol, rhs > 0.0 ? err / rhs : 0.0);
  InequalityReport r = make_report("layer", "h = " + h.name + " on " + q->measure->name(), n, lhs, rhs, tol);
  r.meta = grid_meta(*q);
  r.meta["levels"] = mids.size();
  r.meta["level_quadrature_bound"] = number(err);
  return r;
}

double bl3_rhs(const Quadrature& q, const TestFunction& g, const TestFunction& h) {
  require_smooth(q, "bl3_rhs");
  if (q.dimension() != 1) throw Error(ErrorKind::invalid_dimension, "the one-dimensional formula needs n = 1");
  const Potential& p = q.measure->potential();
  const auto keep = essential_nodes(q);
  double sup = 0.0;
  std::vector<double> t(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec x = q.grid->point(i);
    const double gp = g.gradient ? g.gradient(x)[0] : numeric_gradient(g.value, x)[0];
    const double hp = h.gradient ? h.gradient(x)[0] : numeric_gradient(h.value, x)[0];
    t[i] = q.mass[i] * std::abs(gp);
    if (keep[i]) sup = std::max(sup, std::abs(hp) / p.hessian(x)(0, 0));
  }
  return sup * pairwise_sum(t);
}

}  // namespace lcbl
