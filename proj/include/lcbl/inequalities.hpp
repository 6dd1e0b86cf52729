#pragma once

#include <optional>

#include "lcbl/divided_difference.hpp"
#include "lcbl/operators.hpp"
#include "lcbl/report.hpp"

namespace lcbl {

struct VerifyOptions {
  double tol = kDefaultTolerance;
  PoissonOptions poisson;
  /// Poisson sub-reports run on a coarser grid above this node count.
  std::size_t poisson_node_limit = 70000;
  /// Monte Carlo for divided differences (forced for n >= 4).
  bool monte_carlo = false;
  MonteCarloOptions mc;
};

/// int g h dmu - (int g dmu)(int h dmu).
double covariance(const Quadrature& q, const Field& g, const Field& h);

/// var(h) <= int (grad h, Hess^{-1} grad h) dmu.
InequalityReport verify_bl_variance(const QuadraturePtr& q, const TestFunction& h, const VerifyOptions& opts = {});

/// |cov(g,h)| <= ||Hess^{-1/p} grad g||_q ||lambda_min^{(2-p)/p} Hess^{-1/p} grad h||_p
/// with sub-reports: corollary-lam, cobo7 (via the Poisson solve), BL2 at
/// p = 2 and BL4.2 at p = infinity. Throws domain-error for p < 2.
InequalityReport verify_asym(const QuadraturePtr& q, const TestFunction& g, const TestFunction& h, double p,
                             const VerifyOptions& opts = {});

/// The cobo7 dual estimate alone, with the dual-identity diagnostics in meta.
InequalityReport verify_dual_estimate(const QuadraturePtr& q, const TestFunction& g, const TestFunction& h,
                                      double p, const VerifyOptions& opts = {});

/// int int |h(x)-h(y)|/|x-y| <= 2^n int |grad h| (field mode). Node-pair
/// quadrature on q, or Monte Carlo when requested, when n >= 4, or when q is
/// null.
InequalityReport verify_divided_difference(const MeasurePtr& m, const QuadraturePtr& q, const TestFunction& h,
                                           const VerifyOptions& opts = {});

/// Characteristic mode: h = indicator of `set`, rhs = 2^n times the weighted
/// perimeter. 1-D sets use an exact cell grid with `cells` cells; halfspaces
/// use the node grid of q.
InequalityReport verify_divided_difference_set(const MeasurePtr& m, const SetSpec& set,
                                               const QuadraturePtr& q = nullptr, std::size_t cells = 1024,
                                               const VerifyOptions& opts = {});

/// |cov(g,h)| <= C (int |grad g| + (n-1) divdiff(g)), C = sup |grad h| / lambda_min.
InequalityReport verify_cov6(const QuadraturePtr& q, const TestFunction& g, const TestFunction& h,
                             const VerifyOptions& opts = {});

/// Discrete layer-cake bound for nonnegative h: node-pair divided difference of
/// h against the t-integral over `levels` levels of the indicator version.
InequalityReport verify_layer_cake(const QuadraturePtr& q, const TestFunction& h, std::size_t levels = 64,
                                   const VerifyOptions& opts = {});

/// sup |h'/f''| * int |g'| dmu on a 1-D quadrature (essential sup).
double bl3_rhs(const Quadrature& q, const TestFunction& g, const TestFunction& h);

}  // namespace lcbl
