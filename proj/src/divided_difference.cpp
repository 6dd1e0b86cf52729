#include "lcbl/divided_difference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "lcbl/error.hpp"
#include "lcbl/kernels.hpp"
#include "lcbl/parallel.hpp"

namespace lcbl {

namespace {

constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

double phi_log(double t) { return t > 0.0 ? t * std::log(t) - t : 0.0; }

struct Soa {
  std::vector<std::vector<double>> coords;
  std::vector<const double*> ptrs;
  PointSet points;
};

Soa make_soa(const Grid& grid) {
  Soa s;
  s.coords = grid.coordinates_soa();
  for (const auto& c : s.coords) s.ptrs.push_back(c.data());
  s.points = PointSet{grid.dimension(), s.ptrs.data(), grid.size()};
  return s;
}

void check_pair_budget(std::size_t nodes) {
  const double pairs = static_cast<double>(nodes) * static_cast<double>(nodes);
  if (pairs > kPairBudget) {
    std::ostringstream os;
    os << "product grid needs " << pairs << " node pairs (budget " << kPairBudget
       << "); lower the nodes per axis or enable Monte Carlo with --mc on";
    throw Error(ErrorKind::budget_exceeded, os.str());
  }
}

}  // namespace

bool SetSpec::contains(const Vec& x) const {
  switch (kind) {
    case Kind::half_line: return lower ? x[0] < a : x[0] > a;
    case Kind::interval: return x[0] > a && x[0] < b;
    case Kind::halfspace: return x.dot(direction) < a;
  }
  return false;
}

std::vector<double> SetSpec::boundary_points() const {
  switch (kind) {
    case Kind::half_line: return {a};
    case Kind::interval: return {a, b};
    case Kind::halfspace: return {};
  }
  return {};
}

std::string SetSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::half_line: os << (lower ? "(-inf, " : "(") << a << (lower ? ")" : ", inf)"); break;
    case Kind::interval: os << "(" << a << ", " << b << ")"; break;
    case Kind::halfspace:
      os << "{x.d < " << a << "}, d = (";
      for (Eigen::Index i = 0; i < direction.size(); ++i) os << (i ? ", " : "") << direction[i];
      os << ")";
      break;
  }
  return os.str();
}

CellGrid1D cell_grid_1d(const Measure& m, std::size_t cells, const std::vector<double>& extra_edges,
                        bool align_breakpoints) {
  if (m.dimension() != 1) throw Error(ErrorKind::invalid_dimension, "cell grids are 1-D");
  if (cells < 1) throw Error(ErrorKind::invalid_input, "cell grid needs at least one cell");
  const double lo = m.box().lo[0];
  const double hi = m.box().hi[0];
  std::vector<double> edges;
  for (std::size_t i = 0; i <= cells; ++i) edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
  edges.back() = hi;
  if (align_breakpoints) {
    for (double b : m.breakpoints()) edges.push_back(b);
  }
  for (double e : extra_edges) {
    if (e > lo && e < hi) edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());
  const double merge = 1e-12 * (hi - lo);
  std::vector<double> unique;
  for (double e : edges) {
    if (unique.empty() || e - unique.back() > merge) unique.push_back(e);
  }
  CellGrid1D g;
  g.edges = std::move(unique);
  g.mass.resize(g.edges.size() - 1);
  Vec x(1);
  for (std::size_t i = 0; i + 1 < g.edges.size(); ++i) {
    const double a = g.edges[i];
    const double b = g.edges[i + 1];
    if (m.is_smooth()) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) {
        x[0] = a + 0.5 * (b - a) * (kGlX[k] + 1.0);
        acc += kGlW[k] * m.density(x);
      }
      g.mass[i] = 0.5 * (b - a) * acc;
    } else {
      g.mass[i] = m.mass_between(a, b);
    }
  }
  return g;
}

double cell_pair_kernel(double a, double b, double c, double d) {
  if (c < b) {
    std::swap(a, c);
    std::swap(b, d);
  }
  return phi_log(d - a) - phi_log(d - b) - phi_log(c - a) + phi_log(c - b);
}

std::vector<double> cell_pair_matrix(const CellGrid1D& cells) {
  const std::size_t n = cells.size();
  std::vector<double> w(n * n, 0.0);
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) dens[i] = cells.mass[i] / cells.width(i);
  parallel_chunks(n, 32, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || dens[i] == 0.0 || dens[j] == 0.0) continue;
        w[i * n + j] = dens[i] * dens[j] *
                       cell_pair_kernel(cells.edges[i], cells.edges[i + 1], cells.edges[j], cells.edges[j + 1]);
      }
    }
  });
  return w;
}

double set_divided_difference_1d(const CellGrid1D& cells, const std::vector<char>& in_set) {
  const std::size_t n = cells.size();
  if (in_set.size() != n) throw Error(ErrorKind::invalid_input, "set mask does not match the cell grid");
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) dens[i] = cells.mass[i] / cells.width(i);
  const std::vector<double> rows = parallel_map(n, [&](std::size_t i) {
    if (!in_set[i] || dens[i] == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_set[j] || dens[j] == 0.0) continue;
      acc += dens[j] * cell_pair_kernel(cells.edges[i], cells.edges[i + 1], cells.edges[j], cells.edges[j + 1]);
    }
    return 2.0 * dens[i] * acc;
  });
  return pairwise_sum(rows);
}

double set_boundary_1d(const Measure& m, const CellGrid1D& cells, const std::vector<char>& in_set) {
  double total = 0.0;
  Vec x(1);
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (in_set[k] == in_set[k - 1]) continue;
    if (m.is_smooth()) {
      x[0] = cells.edges[k];
      total += m.density(x);
    } else {
      total += (cells.mass[k - 1] + cells.mass[k]) / (cells.width(k - 1) + cells.width(k));
    }
  }
  return total;
}

std::vector<char> cells_in_set(const CellGrid1D& cells, const SetSpec& set) {
  std::vector<char> in(cells.size());
  Vec x(1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    x[0] = cells.center(i);
    in[i] = set.contains(x) ? 1 : 0;
  }
  return in;
}

double divided_difference_field(const Quadrature& q, const Field& h, const VectorField& grad_h) {
  const std::size_t size = q.size();
  if (h.values.size() != size || grad_h.values.size() != size * static_cast<std::size_t>(q.dimension())) {
    throw Error(ErrorKind::invalid_input, "fields do not match the grid");
  }
  require_finite(h, "divided difference field");
  check_pair_budget(size);
  const Soa soa = make_soa(*q.grid);
  const KernelTable& k = active_kernels();
  const int n = q.dimension();
  const std::vector<double> rows = parallel_map(size, [&](std::size_t i) {
    double xi[16];
    for (int a = 0; a < n; ++a) xi[a] = soa.coords[a][i];
    const double off = k.divdiff_row(soa.points, xi, h.values[i], h.values.data(), q.mass.data(), i + 1, size);
    double g2 = 0.0;
    for (double c : grad_h.at(i)) g2 += c * c;
    return q.mass[i] * (2.0 * off + q.mass[i] * std::sqrt(g2));
  });
  return pairwise_sum(rows);
}

double divided_difference_set_nd(const Quadrature& q, const std::vector<char>& in_set) {
  const std::size_t size = q.size();
  if (in_set.size() != size) throw Error(ErrorKind::invalid_input, "set mask does not match the grid");
  check_pair_budget(size);
  const Soa soa = make_soa(*q.grid);
  const KernelTable& k = active_kernels();
  const int n = q.dimension();
  std::vector<double> outside(size);
  for (std::size_t j = 0; j < size; ++j) outside[j] = in_set[j] ? 0.0 : q.mass[j];
  const std::vector<double> rows = parallel_map(size, [&](std::size_t i) {
    if (!in_set[i] || q.mass[i] == 0.0) return 0.0;
    double xi[16];
    for (int a = 0; a < n; ++a) xi[a] = soa.coords[a][i];
    return 2.0 * q.mass[i] *
           (k.inverse_distance_row(soa.points, xi, outside.data(), 0, i) +
            k.inverse_distance_row(soa.points, xi, outside.data(), i + 1, size));
  });
  return pairwise_sum(rows);
}

double hyperplane_density(const Measure& m, const Vec& direction, double offset, std::size_t nodes) {
  if (!m.is_smooth()) throw Error(ErrorKind::unsupported_form, "hyperplane integrals need a smooth measure");
  const int n = m.dimension();
  const Vec d = direction.normalized();
  if (n == 1) return m.density(Vec::Constant(1, offset * d[0]));
  Eigen::HouseholderQR<Mat> qr(d);
  const Mat full = qr.householderQ() * Mat::Identity(n, n);
  const Mat basis = full.rightCols(n - 1);
  double radius = 0.0;
  for (int a = 0; a < n; ++a) radius += std::pow(std::max(std::abs(m.box().lo[a]), std::abs(m.box().hi[a])), 2);
  radius = std::sqrt(radius);
  GridPtr plane = build_grid(Box::cube(n - 1, radius), nodes);
  std::vector<double> terms(plane->size());
  for (std::size_t i = 0; i < plane->size(); ++i) {
    const Vec x = offset * d + basis * plane->point(i);
    terms[i] = plane->weight(i) * m.density(x);
  }
  return pairwise_sum(terms);
}

double covariance_pairwise(const Quadrature& q, const Field& g, const Field& h) {
  const std::size_t size = q.size();
  check_pair_budget(size);
  const KernelTable& k = active_kernels();
  const std::vector<double> rows = parallel_map(size, [&](std::size_t i) {
    return q.mass[i] * k.pair_covariance_row(g.values[i], h.values[i], g.values.data(), h.values.data(),
                                             q.mass.data(), i + 1, size);
  });
  return pairwise_sum(rows);
}

Sampler::Sampler(MeasurePtr m, QuadraturePtr q) : measure_(std::move(m)), quad_(std::move(q)) {
  if (!measure_->is_smooth()) {
    method_ = "inverse-cdf-piecewise";
    double acc = 0.0;
    const auto& bp = measure_->breakpoints();
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      acc += measure_->densities()[k] * (bp[k + 1] - bp[k]);
      cdf_.push_back(acc);
    }
    return;
  }
  if (const auto& precision = measure_->potential().gaussian_precision()) {
    method_ = "gaussian-exact";
    const Eigen::LLT<Mat> llt(*precision);
    const Mat l = llt.matrixL();
    chol_inv_t_ = l.transpose().inverse();
    return;
  }
  if (!quad_) {
    throw Error(ErrorKind::budget_exceeded,
                "no exact sampler for potential '" + measure_->name() + "' and no grid to sample from");
  }
  method_ = "inverse-cdf-grid";
  double acc = 0.0;
  for (double m : quad_->mass) {
    acc += m;
    cdf_.push_back(acc);
  }
}

void Sampler::draw(std::uint64_t seed, std::uint64_t stream_id, std::size_t count, Mat& out) const {
  const int n = measure_->dimension();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.resize(static_cast<long>(count), n);
  for (std::size_t s = 0; s < count; ++s) {
    const long row = static_cast<long>(s);
    if (method_ == "gaussian-exact") {
      Vec z(n);
      for (int a = 0; a < n; ++a) z[a] = normal(rng);
      out.row(row) = (chol_inv_t_ * z).transpose();
    } else if (method_ == "inverse-cdf-piecewise") {
      const double u = unit(rng) * cdf_.back();
      std::size_t k = static_cast<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      k = std::min(k, cdf_.size() - 1);
      const auto& bp = measure_->breakpoints();
      out(row, 0) = bp[k] + unit(rng) * (bp[k + 1] - bp[k]);
    } else {
      const double u = unit(rng) * cdf_.back();
      std::size_t k = static_cast<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      k = std::min(k, cdf_.size() - 1);
      const Grid& grid = *quad_->grid;
      for (int a = 0; a < n; ++a) {
        const Axis& ax = grid.axis(a);
        const std::size_t idx = grid.index_along(k, a);
        const double lo = idx == 0 ? ax.nodes[0] : 0.5 * (ax.nodes[idx - 1] + ax.nodes[idx]);
        const double hi = idx + 1 == ax.size() ? ax.nodes[idx] : 0.5 * (ax.nodes[idx] + ax.nodes[idx + 1]);
        out(row, a) = lo + unit(rng) * (hi - lo);
      }
    }
  }
}

MonteCarloEstimate divided_difference_mc(const Sampler& sampler, const TestFunction& h,
                                         double rhs_scale, const MonteCarloOptions& opts) {
  if (!opts.seed) throw Error(ErrorKind::config_error, "seed required for Monte Carlo estimates");
  if (opts.samples < 100) throw Error(ErrorKind::invalid_input, "Monte Carlo needs at least 100 samples");
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (opts.samples + kChunk - 1) / kChunk;
  struct Moments {
    double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
  };
  std::vector<Moments> parts(chunks);
  parallel_chunks(chunks, 1, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      const std::size_t count = std::min(kChunk, opts.samples - c * kChunk);
      Mat x, y;
      sampler.draw(*opts.seed, 2 * c, count, x);
      sampler.draw(*opts.seed, 2 * c + 1, count, y);
      Moments m;
      for (std::size_t s = 0; s < count; ++s) {
        const Vec xs = x.row(static_cast<long>(s)).transpose();
        const Vec ys = y.row(static_cast<long>(s)).transpose();
        const double dist = (xs - ys).norm();
        const double av = dist > 0.0 ? std::abs(h.value(xs) - h.value(ys)) / dist : 0.0;
        const Vec gx = h.gradient ? h.gradient(xs) : numeric_gradient(h.value, xs);
        const Vec gy = h.gradient ? h.gradient(ys) : numeric_gradient(h.value, ys);
        const double bv = rhs_scale * 0.5 * (gx.norm() + gy.norm());
        m.a += av;
        m.b += bv;
        m.aa += av * av;
        m.bb += bv * bv;
        m.ab += av * bv;
      }
      parts[c] = m;
    }
  });
  Moments tot;
  for (const auto& m : parts) {
    tot.a += m.a;
    tot.b += m.b;
    tot.aa += m.aa;
    tot.bb += m.bb;
    tot.ab += m.ab;
  }
  const double n = static_cast<double>(opts.samples);
  MonteCarloEstimate est;
  est.samples = opts.samples;
  est.sampler = sampler.method();
  est.lhs = tot.a / n;
  est.rhs = tot.b / n;
  const double va = std::max(0.0, tot.aa / n - est.lhs * est.lhs);
  const double vb = std::max(0.0, tot.bb / n - est.rhs * est.rhs);
  const double cab = tot.ab / n - est.lhs * est.rhs;
  est.lhs_sigma = std::sqrt(va / n);
  if (est.rhs > 0.0) {
    est.ratio = est.lhs / est.rhs;
    const double var = (va - 2.0 * est.ratio * cab + est.ratio * est.ratio * vb) / (est.rhs * est.rhs * n);
    est.ratio_sigma = std::sqrt(std::max(0.0, var));
  } else {
    est.ratio = est.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return est;
}

}  // namespace lcbl
