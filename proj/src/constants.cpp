#include "lcbl/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lcbl/error.hpp"
#include "lcbl/parallel.hpp"

namespace lcbl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finish(ScanResult& s) {
  s.best = -kInf;
  for (std::size_t k = 0; k < s.ratios.size(); ++k) {
    if (s.ratios[k] > s.best) {
      s.best = s.ratios[k];
      s.argmax = s.parameters[k];
    }
  }
  if (s.ratios.empty()) {
    s.best = 0.0;
    s.flags.push_back("no-valid-trials");
  }
}

// Indices of the interior edges used as cut points, at most `limit` of them,
// always including the edge closest to 0.
std::vector<std::size_t> cut_edges(const CellGrid1D& cells, std::size_t limit) {
  const std::size_t interior = cells.edges.size() - 2;
  const std::size_t step = std::max<std::size_t>(1, (interior + limit - 1) / std::max<std::size_t>(limit, 1));
  std::vector<std::size_t> out;
  std::size_t nearest = 1;
  for (std::size_t k = 1; k + 1 < cells.edges.size(); ++k) {
    if (std::abs(cells.edges[k]) < std::abs(cells.edges[nearest])) nearest = k;
  }
  for (std::size_t k = 1 + (nearest - 1) % step; k + 1 < cells.edges.size(); k += step) out.push_back(k);
  return out;
}

double edge_density(const Measure& m, const CellGrid1D& cells, std::size_t k) {
  if (m.is_smooth()) return m.density(Vec::Constant(1, cells.edges[k]));
  return (cells.mass[k - 1] + cells.mass[k]) / (cells.width(k - 1) + cells.width(k));
}

std::vector<Vec> scan_directions(int n, std::size_t count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Ones(1));
  } else if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      Vec d(2);
      d << std::cos(t), std::sin(t);
      dirs.push_back(d);
    }
  } else {
    // Fibonacci points on the upper half sphere plus the coordinate axes.
    for (int a = 0; a < n; ++a) dirs.push_back(Vec::Unit(n, a));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(1.0 - z * z);
      Vec d = Vec::Zero(n);
      d[0] = r * std::cos(golden * static_cast<double>(k));
      d[1] = r * std::sin(golden * static_cast<double>(k));
      d[2] = z;
      dirs.push_back(d);
    }
  }
  return dirs;
}

double projection_radius(const Box& box, const Vec& d) {
  double r = 0.0;
  for (int a = 0; a < box.dimension(); ++a) r += std::max(std::abs(box.lo[a]), std::abs(box.hi[a])) * std::abs(d[a]);
  return r;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ";" : "") << v[k];
  return os.str();
}

}  // namespace

Json to_json(const ScanResult& s) {
  Json j;
  j["tag"] = s.tag;
  j["parameter_names"] = s.parameter_names;
  j["best"] = number(s.best);
  j["argmax"] = Json::array();
  for (double v : s.argmax) j["argmax"].push_back(number(v));
  j["trials"] = s.ratios.size();
  j["flags"] = s.flags;
  if (!s.meta.empty()) j["meta"] = s.meta;
  return j;
}

std::string to_csv(const ScanResult& s) {
  std::ostringstream os;
  os.precision(17);
  os << "parameter,ratio\n";
  for (std::size_t k = 0; k < s.ratios.size(); ++k) os << join(s.parameters[k]) << ',' << s.ratios[k] << '\n';
  return os.str();
}

ScanResult scan_sharp_constant_1d(const Measure& m, ScanMode mode, const ScanOptions& opts) {
  if (m.dimension() != 1) throw Error(ErrorKind::invalid_dimension, "scan_sharp_constant_1d needs a 1-D measure");
  const CellGrid1D cells = cell_grid_1d(m, opts.cells);
  const std::size_t size = cells.size();
  if (static_cast<double>(size) * static_cast<double>(size) > kPairBudget) {
    throw Error(ErrorKind::budget_exceeded, "scan cell grid exceeds the pair budget");
  }
  const std::vector<double> w = cell_pair_matrix(cells);
  const double factor = opts.without_factor ? 1.0 : 2.0;
  const auto cuts = cut_edges(cells, opts.thresholds);
  ScanResult s;
  s.tag = "char-1d";
  std::size_t skipped = 0;
  bool divergent = false;
  auto record = [&](std::vector<double> param, double lhs, double boundary) {
    if (boundary <= 0.0) {
      ++skipped;
      if (lhs > 0.0) divergent = true;
      return;
    }
    s.parameters.push_back(std::move(param));
    s.ratios.push_back(lhs / (factor * boundary));
  };

  // Cumulative block sums S[i][j] = sum_{i' < i, j' < j} W.
  const std::size_t stride = size + 1;
  std::vector<double> prefix(stride * stride, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      row += w[i * size + j];
      prefix[(i + 1) * stride + j + 1] = prefix[i * stride + j + 1] + row;
    }
  }
  auto block = [&](std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) {
    return prefix[i1 * stride + j1] - prefix[i0 * stride + j1] - prefix[i1 * stride + j0] + prefix[i0 * stride + j0];
  };

  if (mode == ScanMode::half_lines) {
    s.parameter_names = {"t"};
    for (std::size_t k : cuts) {
      const double lhs = 2.0 * block(k, size, 0, k);
      record({cells.edges[k]}, lhs, edge_density(m, cells, k));
    }
  } else {
    s.parameter_names = {"a", "b"};
    // Interval trials use every cut pair plus the support ends.
    std::vector<std::size_t> ends{0};
    ends.insert(ends.end(), cuts.begin(), cuts.end());
    ends.push_back(size);
    const std::size_t count = ends.size();
    for (std::size_t x = 0; x < count; ++x) {
      for (std::size_t y = x + 1; y < count; ++y) {
        const std::size_t a = ends[x];
        const std::size_t b = ends[y];
        if (a == 0 && b == size) continue;
        const double inside_out = block(a, b, 0, size) - block(a, b, a, b);
        double boundary = 0.0;
        if (a > 0) boundary += edge_density(m, cells, a);
        if (b < size) boundary += edge_density(m, cells, b);
        record({cells.edges[a], cells.edges[b]}, 2.0 * inside_out, boundary);
      }
    }
  }
  if (skipped > 0) s.flags.push_back("skipped-zero-boundary:" + std::to_string(skipped));
  if (divergent) s.flags.push_back("divergent");
  finish(s);
  s.meta["cells"] = size;
  s.meta["measure"] = m.name();
  s.meta["factor_divided_out"] = !opts.without_factor;
  return s;
}

Marginal marginal_density(const Measure& m, const Vec& direction, std::size_t offsets, std::size_t plane_nodes) {
  if (!m.is_smooth()) throw Error(ErrorKind::unsupported_form, "marginals need a smooth measure");
  if (offsets < 3) throw Error(ErrorKind::invalid_input, "marginal needs at least 3 offsets");
  const Vec d = direction.normalized();
  const double r = projection_radius(m.box(), d);
  Marginal out;
  out.offsets.resize(offsets);
  for (std::size_t k = 0; k < offsets; ++k) {
    out.offsets[k] = -r + 2.0 * r * static_cast<double>(k) / static_cast<double>(offsets - 1);
  }
  out.density = parallel_map(offsets, [&](std::size_t k) { return hyperplane_density(m, d, out.offsets[k], plane_nodes); });
  return out;
}

MeasurePtr marginal_measure(const Marginal& marginal) {
  std::vector<double> dens;
  for (std::size_t k = 0; k + 1 < marginal.offsets.size(); ++k) {
    dens.push_back(0.5 * (marginal.density[k] + marginal.density[k + 1]));
  }
  return make_piecewise_1d(marginal.offsets, dens);
}

ScanResult cheeger_estimate(const Measure& m, const CheegerOptions& opts) {
  ScanResult s;
  s.tag = "cheeger";
  s.flags.push_back("lower-bound");
  const int n = m.dimension();
  if (n == 1) {
    s.parameter_names = {"t"};
    const CellGrid1D cells = cell_grid_1d(m, opts.cells);
    double total = 0.0;
    for (double v : cells.mass) total += v;
    double below = 0.0;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      below += cells.mass[k - 1];
      const double a = below / total;
      const double boundary = edge_density(m, cells, k);
      if (boundary <= 0.0) continue;
      s.parameters.push_back({cells.edges[k]});
      s.ratios.push_back(a * (1.0 - a) / boundary);
    }
  } else {
    s.parameter_names = {"direction", "offset"};
    for (int a = 1; a < n; ++a) s.parameter_names.insert(s.parameter_names.begin() + a, "direction");
    for (const Vec& d : scan_directions(n, opts.directions)) {
      const Marginal marg = marginal_density(m, d, opts.offsets, opts.plane_nodes);
      // Cumulative mass by the trapezoid rule on the marginal.
      std::vector<double> cdf(marg.offsets.size(), 0.0);
      for (std::size_t k = 1; k < cdf.size(); ++k) {
        cdf[k] = cdf[k - 1] + 0.5 * (marg.density[k] + marg.density[k - 1]) * (marg.offsets[k] - marg.offsets[k - 1]);
      }
      const double total = cdf.back();
      for (std::size_t k = 1; k + 1 < cdf.size(); ++k) {
        if (marg.density[k] <= 0.0) continue;
        const double a = cdf[k] / total;
        std::vector<double> param(d.data(), d.data() + n);
        param.push_back(marg.offsets[k]);
        s.parameters.push_back(std::move(param));
        s.ratios.push_back(a * (1.0 - a) / (marg.density[k] / total));
      }
    }
  }
  finish(s);
  s.meta["measure"] = m.name();
  return s;
}

ScanResult ledoux_bound(const Quadrature& q, double alpha, const LedouxOptions& opts) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::invalid_input, "Ledoux bound needs alpha > 0");
  const int n = q.dimension();
  const std::size_t size = q.size();
  const auto coords = q.grid->coordinates_soa();
  const double total = pairwise_sum(q.mass);
  const double scale = std::ldexp(1.0, n);

  Vec mean = Vec::Zero(n);
  for (std::size_t i = 0; i < size; ++i) {
    for (int a = 0; a < n; ++a) mean[a] += q.mass[i] * coords[a][i] / total;
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    for (int a = 0; a < n; ++a) spread += q.mass[i] * std::pow(coords[a][i] - mean[a], 2) / total;
  }
  const double length = std::sqrt(spread);

  // Symmetric measures use the center 0; others take the sup over a grid of
  // centers around the mean.
  bool symmetric = true;
  {
    const double floor = 1e-12 * *std::max_element(q.mass.begin(), q.mass.end());
    for (std::size_t i = 0; i < size && symmetric; ++i) {
      const std::size_t j = size - 1 - i;
      for (int a = 0; a < n; ++a) {
        if (std::abs(coords[a][i] + coords[a][j]) > 1e-9 * (1.0 + std::abs(coords[a][i]))) symmetric = false;
      }
      if (std::abs(q.mass[i] - q.mass[j]) > floor + 1e-9 * q.mass[i]) symmetric = false;
    }
  }
  std::vector<Vec> centers;
  if (symmetric) {
    centers.push_back(Vec::Zero(n));
  } else {
    const std::size_t per = std::max<std::size_t>(opts.centers, 1);
    std::size_t count = 1;
    for (int a = 0; a < n; ++a) count *= per;
    for (std::size_t c = 0; c < count; ++c) {
      Vec x = mean;
      std::size_t rest = c;
      for (int a = 0; a < n; ++a) {
        const std::size_t k = rest % per;
        rest /= per;
        if (per > 1) x[a] += length * (-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(per - 1));
      }
      centers.push_back(x);
    }
  }
  auto ball_mass = [&](double r) {
    double best = 0.0;
    for (const Vec& c : centers) {
      double acc = 0.0;
      for (std::size_t i = 0; i < size; ++i) {
        double d2 = 0.0;
        for (int a = 0; a < n; ++a) d2 += std::pow(coords[a][i] - c[a], 2);
        if (d2 < r * r) acc += q.mass[i];
      }
      best = std::max(best, acc / total);
    }
    return best;
  };
  auto value = [&](double r) { return scale * ball_mass(r) + 2.0 * alpha / r; };

  ScanResult s;
  s.tag = "ledoux";
  s.parameter_names = {"R"};
  const double lo = std::log(1e-2 * length);
  const double hi = std::log(1e3 * length);
  std::vector<double> radii(opts.radii);
  for (std::size_t k = 0; k < opts.radii; ++k) {
    radii[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(opts.radii - 1));
  }
  std::vector<double> values = parallel_map(radii.size(), [&](std::size_t k) { return value(radii[k]); });
  const std::size_t at = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  const double left = radii[at > 0 ? at - 1 : at];
  const double right = radii[at + 1 < radii.size() ? at + 1 : at];
  std::vector<double> fine(opts.refine);
  for (std::size_t k = 0; k < opts.refine; ++k) {
    fine[k] = left + (right - left) * static_cast<double>(k + 1) / static_cast<double>(opts.refine + 1);
  }
  const std::vector<double> fine_values = parallel_map(fine.size(), [&](std::size_t k) { return value(fine[k]); });
  radii.insert(radii.end(), fine.begin(), fine.end());
  values.insert(values.end(), fine_values.begin(), fine_values.end());
  radii.push_back(kInf);
  values.push_back(scale);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    s.parameters.push_back({radii[k]});
    s.ratios.push_back(values[k]);
  }
  // The bound is the infimum, not the maximum.
  const std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  s.best = values[best];
  s.argmax = {radii[best]};
  s.meta["alpha"] = number(alpha);
  s.meta["length_scale"] = number(length);
  s.meta["centers"] = centers.size();
  s.meta["symmetric"] = symmetric;
  s.meta["measure"] = q.measure->name();
  return s;
}

InequalityReport halfspace_reduction_check(const QuadraturePtr& q, const Vec& direction, double offset,
                                           const VerifyOptions& opts) {
  const MeasurePtr& m = q->measure;
  if (!m->is_smooth()) throw Error(ErrorKind::unsupported_form, "halfspace reduction needs a smooth measure");
  const int n = m->dimension();
  if (n < 2 || n > 3) throw Error(ErrorKind::invalid_dimension, "halfspace reduction is for n = 2 or 3");
  const Vec d = direction.normalized();
  const InequalityReport nd = verify_divided_difference_set(m, SetSpec::halfspace(d, offset), q, 0, opts);
  const Marginal marg = marginal_density(*m, d, 1025, n == 2 ? 257 : 129);
  const MeasurePtr line = marginal_measure(marg);
  const InequalityReport one = verify_divided_difference_set(line, SetSpec::lower_half_line(offset), nullptr, 1024, opts);
  auto raw = [](const InequalityReport& r) {
    const double b = r.meta["boundary_integral"].is_number() ? r.meta["boundary_integral"].get<double>() : 0.0;
    return b > 0.0 ? r.lhs / b : 0.0;
  };
  InequalityReport r = make_report("halfspace-reduction", "{x . d < " + std::to_string(offset) + "} on " + m->name(), n,
                                   raw(nd), raw(one), opts.tol);
  r.meta["nd_lhs"] = number(nd.lhs);
  r.meta["nd_boundary"] = nd.meta["boundary_integral"];
  r.meta["marginal_lhs"] = number(one.lhs);
  r.meta["marginal_boundary"] = one.meta["boundary_integral"];
  if (r.degenerate) r.meta["skipped"] = "empty-or-full-set";
  return r;
}

LogFit fit_log(const std::vector<double>& eps, const std::vector<double>& ratios) {
  if (eps.size() != ratios.size() || eps.size() < 2) throw Error(ErrorKind::invalid_input, "log fit needs two or more points");
  const double k = static_cast<double>(eps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(1.0 / eps[i]);
    sx += x;
    sy += ratios[i];
    sxx += x * x;
    sxy += x * ratios[i];
  }
  LogFit f;
  f.b = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  f.a = (sy - f.b * sx) / k;
  const double mean = sy / k;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double pred = f.a + f.b * std::log(1.0 / eps[i]);
    ss_res += std::pow(ratios[i] - pred, 2);
    ss_tot += std::pow(ratios[i] - mean, 2);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

MeasurePtr spike_measure(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::invalid_input, "spike width must lie in (0, 1)");
  return make_piecewise_1d({-1.0, -eps, eps, 1.0},
                           {1.0 / (4.0 * (1.0 - eps)), 1.0 / (4.0 * eps), 1.0 / (4.0 * (1.0 - eps))});
}

MeasurePtr gap_measure(double gap) {
  if (!(gap > 0.0 && gap < 1.0)) throw Error(ErrorKind::invalid_input, "gap must lie in (0, 1)");
  return make_piecewise_1d({-1.0, -gap, gap, 1.0}, {1.0, 0.0, 1.0});
}

FailureDemo gap_demo(const std::vector<std::size_t>& cells, const VerifyOptions& opts) {
  FailureDemo d;
  d.tag = "gap";
  const MeasurePtr m = gap_measure(0.1);
  const SetSpec set = SetSpec::upper_half_line(0.0);
  std::vector<double> params, ratios;
  for (std::size_t count : cells) {
    const CellGrid1D grid = cell_grid_1d(*m, count, {}, false);
    const auto in = cells_in_set(grid, set);
    const double lhs = set_divided_difference_1d(grid, in);
    const double boundary = set_boundary_1d(*m, grid, in);
    InequalityReport r = make_report("t1", "indicator of " + set.describe() + " on " + m->name(), 1, lhs,
                                     2.0 * boundary, opts.tol);
    r.meta["cells"] = count;
    r.meta["boundary_integral"] = number(boundary);
    r.meta["divergent"] = boundary == 0.0 && lhs > 0.0;
    d.divergent = d.divergent || (boundary == 0.0 && lhs > 0.0);
    d.parameters.push_back(static_cast<double>(count));
    if (std::isfinite(r.ratio)) {
      params.push_back(1.0 / static_cast<double>(count));
      ratios.push_back(r.ratio);
    }
    d.reports.push_back(std::move(r));
  }
  if (params.size() >= 2) d.fit = fit_log(params, ratios);
  return d;
}

FailureDemo spike_demo(const std::vector<double>& eps, std::size_t cells, const VerifyOptions& opts) {
  FailureDemo d;
  d.tag = "spike";
  std::vector<double> ratios;
  for (double e : eps) {
    const double delta = e / 10.0;
    InequalityReport r =
        verify_divided_difference_set(spike_measure(e), SetSpec::interval(-e - delta, e + delta), nullptr, cells, opts);
    r.meta["eps"] = e;
    r.meta["delta"] = delta;
    d.parameters.push_back(e);
    ratios.push_back(r.ratio);
    d.reports.push_back(std::move(r));
  }
  d.fit = fit_log(eps, ratios);
  return d;
}

Json to_json(const FailureDemo& d) {
  Json j;
  j["tag"] = d.tag;
  j["parameters"] = d.parameters;
  j["ratios"] = Json::array();
  for (const auto& r : d.reports) j["ratios"].push_back(number(r.ratio));
  j["fit"] = {{"a", number(d.fit.a)}, {"b", number(d.fit.b)}, {"r2", number(d.fit.r2)}};
  j["divergent"] = d.divergent;
  return j;
}

}  // namespace lcbl
