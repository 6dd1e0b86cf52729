#include "lcbl/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcbl/error.hpp"
#include "lcbl/operators.hpp"
#include "lcbl/parallel.hpp"
#include "lcbl/stencil.hpp"

namespace lcbl {

namespace {

constexpr double kHFloor = 1e-12;

// Composite 8-point Gauss-Legendre nodes on [-1, 1].
constexpr double kGl8X[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                             0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGl8W[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                             0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

SplitMeasure split_measure(const QuadraturePtr& q, int m) {
  const int dim = q->dimension();
  if (m < 1 || m >= dim) throw Error(ErrorKind::invalid_dimension, "split needs 1 <= m < dimension");
  if (dim > 3) throw Error(ErrorKind::invalid_dimension, "split measures are limited to m + n <= 3");
  if (!q->grid->uniform()) throw Error(ErrorKind::invalid_input, "split measures need a uniform grid");
  SplitMeasure sm;
  sm.q = q;
  sm.m = m;
  std::vector<Axis> y_axes;
  sm.ny = 1;
  sm.nz = 1;
  for (int a = 0; a < dim; ++a) {
    if (a < m) {
      sm.ny *= q->grid->axis(a).size();
      y_axes.push_back(q->grid->axis(a));
    } else {
      sm.nz *= q->grid->axis(a).size();
    }
  }
  sm.y_grid = std::make_shared<Grid>(std::move(y_axes));
  sm.slice_mass.assign(sm.ny, 0.0);
  for (std::size_t k = 0; k < sm.ny; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < sm.nz; ++j) acc += q->mass[sm.node(k, j)];
    if (!(acc > 0.0)) {
      throw Error(ErrorKind::degenerate_slice, "slice " + std::to_string(k) + " carries no mass");
    }
    sm.slice_mass[k] = acc;
  }
  return sm;
}

ConditionalDecomposition conditional_decompose(const SplitMeasure& sm, const Field& h) {
  if (h.values.size() != sm.q->size()) throw Error(ErrorKind::invalid_input, "field does not match the grid");
  ConditionalDecomposition d;
  d.nu = sm.slice_mass;
  d.mean.assign(sm.ny, 0.0);
  for (std::size_t k = 0; k < sm.ny; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < sm.nz; ++j) acc += sm.weight(k, j) * h.values[sm.node(k, j)];
    d.mean[k] = acc;
  }
  return d;
}

InequalityReport verify_conditional_fisher(const SplitMeasure& sm, const TestFunction& h_fn,
                                           const FisherOptions& opts) {
  const Quadrature& q = *sm.q;
  if (!q.measure->is_smooth()) throw Error(ErrorKind::unsupported_form, "Fisher transfer needs a smooth measure");
  const int dim = q.dimension();
  const int m = sm.m;
  const std::size_t size = q.size();
  const Potential& pot = q.measure->potential();

  Field h = sample(h_fn, q.grid);
  VectorField dh = sample_gradient(h_fn, q.grid);
  bool floored = false;
  for (double& v : h.values) {
    if (v < kHFloor) {
      v = kHFloor;
      floored = true;
    }
  }
  const double total = pairwise_sum(q.mass);
  const double mean_h = integrate(h, q) / total;
  for (double& v : h.values) v /= mean_h;
  for (double& v : dh.values) v /= mean_h;

  const SpectralField& spec = spectrum_of(q);
  double kappa = 0.0;
  for (std::size_t i = 0; i < size; ++i) kappa = std::max(kappa, spec.lambda_max(i) / spec.lambda_min(i));
  const double c = 2.0 * kappa * kappa;

  std::vector<double> joint(size);
  for (std::size_t i = 0; i < size; ++i) {
    double g2 = 0.0;
    for (double v : dh.at(i)) g2 += v * v;
    joint[i] = g2 / h.values[i];
  }
  const double joint_fisher = integrate(joint, q) / total;

  // Marginal <h>_z on the y-grid and its derivative by central differences.
  const ConditionalDecomposition dec = conditional_decompose(sm, h);
  const VectorField dmean = fd_gradient(Field{sm.y_grid, dec.mean}, 4);

  std::vector<Vec> dirs;
  if (m == 1) {
    dirs.push_back(Vec::Ones(1));
  } else {
    for (std::size_t k = 0; k < opts.directions; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(opts.directions);
      Vec u(2);
      u << std::cos(t), std::sin(t);
      dirs.push_back(u);
    }
  }

  std::vector<double> marginal(sm.ny);
  std::vector<double> eig37_lhs(sm.ny), eig37_rhs(sm.ny), eig5_lhs(sm.ny), eig5_rhs(sm.ny);
  std::vector<double> analytic_gap(sm.ny);
  double block_kappa = 0.0;
  double eig8_lhs = 0.0, eig8_rhs = 0.0;
  double lam_min_inv = 0.0, fyz_sup = 0.0;
  for (std::size_t i = 0; i < size; ++i) lam_min_inv = std::max(lam_min_inv, 1.0 / spec.lambda_min(i));

  for (std::size_t k = 0; k < sm.ny; ++k) {
    const double hbar = dec.mean[k];
    Vec hy = Vec::Zero(m);
    Vec fy_mean = Vec::Zero(m);
    Vec hfy = Vec::Zero(m);
    double abs_hz = 0.0, fisher_z = 0.0;
    std::vector<Vec> fy(sm.nz);
    for (std::size_t j = 0; j < sm.nz; ++j) {
      const std::size_t i = sm.node(k, j);
      const double w = sm.weight(k, j);
      const Vec x = q.grid->point(i);
      fy[j] = pot.gradient(x).head(m);
      const auto g = dh.at(i);
      double hz2 = 0.0;
      for (int a = m; a < dim; ++a) hz2 += g[a] * g[a];
      for (int a = 0; a < m; ++a) hy[a] += w * g[a];
      fy_mean += w * fy[j];
      abs_hz += w * std::sqrt(hz2);
      fisher_z += w * hz2 / h.values[i];
      const Mat hess = pot.hessian(x);
      const Eigen::SelfAdjointEigenSolver<Mat> block(hess.bottomRightCorner(dim - m, dim - m));
      block_kappa = std::max(block_kappa, spec.lambda_max(i) / block.eigenvalues().minCoeff());
      fyz_sup = std::max(fyz_sup, hess.topRightCorner(m, dim - m).norm());
    }
    // Centered second pass.
    for (std::size_t j = 0; j < sm.nz; ++j) hfy += sm.weight(k, j) * (h.values[sm.node(k, j)] - hbar) * (fy[j] - fy_mean);
    const Vec cov = hfy;
    // Analytic derivative of the marginal: <h_y>_z - cov_z(h, f_y).
    const Vec analytic = hy - cov;
    double fd_norm = 0.0, gap = 0.0;
    for (int a = 0; a < m; ++a) {
      fd_norm += dmean.at(k)[a] * dmean.at(k)[a];
      gap = std::max(gap, std::abs(dmean.at(k)[a] - analytic[a]));
    }
    analytic_gap[k] = gap;
    marginal[k] = dec.nu[k] * fd_norm / hbar;
    double worst_cov = 0.0;
    for (const Vec& u : dirs) worst_cov = std::max(worst_cov, std::abs(cov.dot(u)));
    eig37_lhs[k] = worst_cov;
    eig37_rhs[k] = abs_hz * kappa;
    eig5_lhs[k] = abs_hz * abs_hz;
    eig5_rhs[k] = fisher_z * hbar;
    eig8_lhs += dec.nu[k] * worst_cov * worst_cov / hbar;
    eig8_rhs += dec.nu[k] * fisher_z;
  }
  const double lhs = pairwise_sum(marginal) / total;
  const std::string label = "h = " + h_fn.name + " on " + q.measure->name();
  InequalityReport r = make_report("appl", label, dim, lhs, c * joint_fisher, opts.tol);
  r.meta["m"] = m;
  r.meta["C"] = number(c);
  r.meta["condition_sup"] = number(kappa);
  r.meta["block_condition_sup"] = number(block_kappa);
  r.meta["C_block"] = number(2.0 * block_kappa * block_kappa);
  r.meta["joint_fisher"] = number(joint_fisher);
  r.meta["marginal_fisher"] = number(lhs);
  r.meta["analytic_derivative_gap"] = number(*std::max_element(analytic_gap.begin(), analytic_gap.end()));
  r.meta["eig8"] = {{"lhs", number(eig8_lhs / total)}, {"rhs", number(eig8_rhs / total * lam_min_inv * lam_min_inv * fyz_sup * fyz_sup)}};
  if (floored) r.meta["h_floor"] = kHFloor;
  if (kappa > 1e6) r.meta["warning"] = "ill-conditioned Hessian: lambda_max/lambda_min > 1e6";
  r.sub_reports.push_back(worst_case("eig37", label, dim, eig37_lhs, eig37_rhs, opts.tol));
  r.sub_reports.push_back(worst_case("eig5", label, dim, eig5_lhs, eig5_rhs, opts.tol));
  return r;
}

ScanResult bl35_impossibility_scan(const std::vector<double>& m_values) {
  ScanResult s;
  s.tag = "bl35";
  s.parameter_names = {"M"};
  std::vector<double> cov_values, denominators;
  for (double big_m : m_values) {
    if (!(big_m >= 1.0)) throw Error(ErrorKind::invalid_input, "bl35 scan needs M >= 1");
    const double spike = 1.0 / big_m;
    const double ramp = 0.5 / big_m;
    auto f = [&](double x) {
      const double a = std::abs(x);
      return a <= spike ? 0.5 * big_m * x * x : a - 0.5 * spike;
    };
    auto h = [&](double x) {
      if (x <= -ramp) return 0.0;
      if (x >= ramp) return 1.0;
      const double t = (x + ramp) / (2.0 * ramp);
      return t * t * (3.0 - 2.0 * t);
    };
    auto dh = [&](double x) {
      if (std::abs(x) >= ramp) return 0.0;
      const double t = (x + ramp) / (2.0 * ramp);
      return 6.0 * t * (1.0 - t) / (2.0 * ramp);
    };
    // Panels aligned with the ramp and spike edges; e^{-f} < 1e-17 beyond 40.
    const std::vector<double> edges{-40.0, -spike, -ramp, 0.0, ramp, spike, 40.0};
    double z = 0.0, mx = 0.0, mh = 0.0, mxh = 0.0, grad = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const std::size_t panels = 256;
      const double width = (edges[e + 1] - edges[e]) / static_cast<double>(panels);
      for (std::size_t p = 0; p < panels; ++p) {
        const double a = edges[e] + width * static_cast<double>(p);
        for (int k = 0; k < 8; ++k) {
          const double x = a + 0.5 * width * (kGl8X[k] + 1.0);
          const double w = 0.5 * width * kGl8W[k] * std::exp(-f(x));
          z += w;
          mx += w * x;
          mh += w * h(x);
          mxh += w * x * h(x);
          if (std::abs(x) < spike) grad += w * std::abs(dh(x)) / big_m;
        }
      }
    }
    const double cov = mxh / z - (mx / z) * (mh / z);
    const double denom = grad / z;
    s.parameters.push_back({big_m});
    s.ratios.push_back(std::abs(cov) / denom);
    cov_values.push_back(cov);
    denominators.push_back(denom);
  }
  s.best = 0.0;
  for (std::size_t k = 0; k < s.ratios.size(); ++k) {
    if (s.ratios[k] > s.best) {
      s.best = s.ratios[k];
      s.argmax = s.parameters[k];
    }
  }
  for (std::size_t k = 1; k < s.ratios.size(); ++k) {
    if (!(s.ratios[k] > s.ratios[k - 1])) s.flags.push_back("not-increasing-at:" + std::to_string(k));
  }
  s.meta["cov"] = Json::array();
  s.meta["weighted_gradient"] = Json::array();
  for (std::size_t k = 0; k < cov_values.size(); ++k) {
    s.meta["cov"].push_back(number(cov_values[k]));
    s.meta["weighted_gradient"].push_back(number(denominators[k]));
  }
  return s;
}

}  // namespace lcbl
