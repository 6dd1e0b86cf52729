#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcbl/field.hpp"
#include "lcbl/quadrature.hpp"

namespace lcbl {

/// A trial set for characteristic mode.
/// 1-D: half_line {x > t} (or {x < t} with `lower`), interval (a, b).
/// n-D: halfspace {x . direction < offset}.
struct SetSpec {
  enum class Kind { half_line, interval, halfspace };
  Kind kind = Kind::half_line;
  double a = 0.0;
  double b = 0.0;
  bool lower = false;
  Vec direction;

  static SetSpec upper_half_line(double t) { return {Kind::half_line, t, 0.0, false, {}}; }
  static SetSpec lower_half_line(double t) { return {Kind::half_line, t, 0.0, true, {}}; }
  static SetSpec interval(double lo, double hi) { return {Kind::interval, lo, hi, false, {}}; }
  static SetSpec halfspace(Vec dir, double offset) { return {Kind::halfspace, offset, 0.0, false, std::move(dir)}; }

  bool contains(const Vec& x) const;
  /// Finite 1-D boundary points.
  std::vector<double> boundary_points() const;
  std::string describe() const;
};

/// 1-D cells with exact masses: Gauss-Legendre per cell for smooth measures,
/// exact for piecewise ones. Cell edges always include the measure's
/// breakpoints and any `extra_edges` inside the range.
struct CellGrid1D {
  std::vector<double> edges;
  std::vector<double> mass;

  std::size_t size() const noexcept { return mass.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// `cells` uniform cells over the support (piecewise) or the working box
/// (smooth), refined by breakpoints and extra edges.
CellGrid1D cell_grid_1d(const Measure& m, std::size_t cells, const std::vector<double>& extra_edges = {},
                        bool align_breakpoints = true);

/// int_a^b int_c^d dx dy / |x - y| for disjoint intervals.
double cell_pair_kernel(double a, double b, double c, double d);

/// Matrix W_ij = (M_i/h_i)(M_j/h_j) int int_{cell i x cell j} |x-y|^{-1}, zero
/// on the diagonal, row-major.
std::vector<double> cell_pair_matrix(const CellGrid1D& cells);

/// 2 sum_{i in A, j not in A} W_ij.
double set_divided_difference_1d(const CellGrid1D& cells, const std::vector<char>& in_set);
/// Weighted perimeter of a union of cells: the density at every in/out edge.
/// Smooth measures use the exact density; piecewise measures use
/// (M_l + M_r) / (h_l + h_r).
double set_boundary_1d(const Measure& m, const CellGrid1D& cells, const std::vector<char>& in_set);
std::vector<char> cells_in_set(const CellGrid1D& cells, const SetSpec& set);

/// Node-pair quadrature of int int |h(x)-h(y)|/|x-y| dmu dmu; the diagonal
/// uses m_i^2 |grad h(x_i)|.
double divided_difference_field(const Quadrature& q, const Field& h, const VectorField& grad_h);
/// 2 sum_{i in A, j not in A} m_i m_j / |x_i - x_j| over grid nodes.
double divided_difference_set_nd(const Quadrature& q, const std::vector<char>& in_set);
/// ∫_{x.d = c} e^{-f} dH_{n-1} for a smooth measure, by trapezoid quadrature on
/// the hyperplane.
double hyperplane_density(const Measure& m, const Vec& direction, double offset, std::size_t nodes = 129);

/// 1/2 sum_ij m_i m_j (g_i - g_j)(h_i - h_j).
double covariance_pairwise(const Quadrature& q, const Field& g, const Field& h);

/// Maximum node pairs for quadrature divided differences.
inline constexpr double kPairBudget = 1.5e9;

struct MonteCarloOptions {
  std::size_t samples = 200000;
  std::optional<std::uint64_t> seed;
};

/// Independent draws from a measure. Gaussian and quadratic-form potentials
/// are sampled exactly, piecewise measures by inverse CDF, other smooth
/// measures by inverse CDF on a grid with uniform jitter inside the cell.
class Sampler {
 public:
  Sampler(MeasurePtr m, QuadraturePtr q);
  /// Fills `count` points into out (row per point) using the stream for `stream_id`.
  void draw(std::uint64_t seed, std::uint64_t stream_id, std::size_t count, Mat& out) const;
  const std::string& method() const noexcept { return method_; }

 private:
  MeasurePtr measure_;
  QuadraturePtr quad_;
  std::string method_;
  Mat chol_inv_t_;
  std::vector<double> cdf_;
};

struct MonteCarloEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_sigma = 0.0;
  double lhs_sigma = 0.0;
  std::size_t samples = 0;
  std::string sampler;
};

/// lhs = E|h(X)-h(Y)|/|X-Y|, rhs = scale * E|grad h|, with delta-method sigma
/// for the ratio.
MonteCarloEstimate divided_difference_mc(const Sampler& sampler, const TestFunction& h,
                                         double rhs_scale, const MonteCarloOptions& opts);

}  // namespace lcbl
