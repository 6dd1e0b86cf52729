#pragma once

#include <string>
#include <vector>

#include "lcbl/inequalities.hpp"
#include "lcbl/report.hpp"

namespace lcbl {

/// Trials of a constant estimate. `parameters[k]` describes trial k (a
/// threshold, an interval, a direction and offset, or a radius).
struct ScanResult {
  std::string tag;
  std::vector<std::string> parameter_names;
  std::vector<std::vector<double>> parameters;
  std::vector<double> ratios;
  double best = 0.0;
  std::vector<double> argmax;
  std::vector<std::string> flags;
  Json meta = Json::object();
};

Json to_json(const ScanResult& s);
/// Rows "parameter,ratio"; multi-part parameters are joined with ';'.
std::string to_csv(const ScanResult& s);

enum class ScanMode { half_lines, intervals };

struct ScanOptions {
  std::size_t cells = 1024;
  /// Candidate cut points per scan (subsampled cell edges).
  std::size_t thresholds = 256;
  /// Divide out 2^n so ratios compare to the best constant itself.
  bool without_factor = true;
};

/// Ratio divdiff(chi_A) / boundary integral over half-lines (t, inf) or
/// intervals (a, b). Trials whose boundary integral vanishes are skipped and
/// flagged; a vanishing boundary under positive lhs flags divergence.
ScanResult scan_sharp_constant_1d(const Measure& m, ScanMode mode, const ScanOptions& opts = {});

struct CheegerOptions {
  std::size_t cells = 1024;
  std::size_t directions = 32;
  std::size_t offsets = 257;
  std::size_t plane_nodes = 129;
};

/// sup over half-spaces of mu(A)(1 - mu(A)) / boundary integral. A lower
/// bound on the Cheeger constant.
ScanResult cheeger_estimate(const Measure& m, const CheegerOptions& opts = {});

struct LedouxOptions {
  std::size_t radii = 64;
  std::size_t refine = 64;
  /// Centers per axis for the sup over ball centers of non-symmetric measures.
  std::size_t centers = 9;
};

/// inf over R of 2^n sup_c mu(B_R(c)) + 2 alpha / R, including the R = inf
/// limit 2^n. Ball masses sum the node masses of q inside the ball.
ScanResult ledoux_bound(const Quadrature& q, double alpha, const LedouxOptions& opts = {});

/// Density of the projection x . dir on `offsets` equally spaced offsets
/// covering the working box.
struct Marginal {
  std::vector<double> offsets;
  std::vector<double> density;
};
Marginal marginal_density(const Measure& m, const Vec& direction, std::size_t offsets, std::size_t plane_nodes);
/// The marginal as a piecewise-constant 1-D measure (cell averages).
MeasurePtr marginal_measure(const Marginal& marginal);

/// n-D divided-difference ratio of chi_{x . dir < c} (lhs) against the same
/// ratio for the 1-D marginal along dir (rhs).
InequalityReport halfspace_reduction_check(const QuadraturePtr& q, const Vec& direction, double offset,
                                           const VerifyOptions& opts = {});

/// ratio ~ a + b ln(1/eps) by least squares.
struct LogFit {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
};
LogFit fit_log(const std::vector<double>& eps, const std::vector<double>& ratios);

/// Piecewise density 1/(4(1-eps)) on (-1,-eps) and (eps,1), 1/(4 eps) on (-eps, eps).
MeasurePtr spike_measure(double eps);
/// Density 1 on (-1,-gap) and (gap,1), zero on the gap.
MeasurePtr gap_measure(double gap);

struct FailureDemo {
  std::string tag;
  std::vector<double> parameters;
  std::vector<InequalityReport> reports;
  LogFit fit;
  bool divergent = false;
};

/// chi_{(0,inf)} on gap_measure(0.1) over uniform cell grids that are not
/// aligned to the gap; the ratio is infinite once the gap holds a full cell
/// on each side of 0.
FailureDemo gap_demo(const std::vector<std::size_t>& cells = {8, 16, 32, 64}, const VerifyOptions& opts = {});
/// chi_{(-eps-delta, eps+delta)} on spike_measure(eps), delta = eps/10.
FailureDemo spike_demo(const std::vector<double>& eps = {1e-1, 1e-2, 1e-3}, std::size_t cells = 1024,
                       const VerifyOptions& opts = {});

Json to_json(const FailureDemo& d);

}  // namespace lcbl
