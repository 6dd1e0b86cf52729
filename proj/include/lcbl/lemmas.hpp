#pragma once

#include <cstdint>
#include <optional>

#include "lcbl/conditional.hpp"
#include "lcbl/linalg.hpp"

namespace lcbl {

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// |A^{1/p} v|^p <= |v|^{p-2} |A^{1/2} v|^2 for symmetric positive definite A
/// and p >= 2.
LemmaCheck check_matrix_power_lemma(const Mat& a, const Vec& v, double p);
/// a^2/alpha <= b^2/beta + (a-b)^2/(alpha-beta) for alpha > beta > 0.
LemmaCheck check_quotient_convexity(double a, double b, double alpha, double beta);

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// min over cases of (rhs - lhs) / max(|rhs|, tiny).
  double worst_margin = 0.0;
  std::optional<std::size_t> first_failure;
  std::uint64_t seed = 0;
};

Json to_json(const SuiteResult& s);

/// Random 3x3 SPD matrices Q diag(lambda) Q^T with log-uniform eigenvalues in
/// [1e-3, 1e3], Gaussian v and p uniform in [2, 32]. Case k draws from its own
/// stream seeded by (seed, k).
SuiteResult matrix_power_suite(std::size_t cases, std::uint64_t seed, int dimension = 3);
SuiteResult quotient_convexity_suite(std::size_t cases, std::uint64_t seed);

/// One inductive step of the variance inequality at every y-node of a 2-D
/// split measure (m = 1): the slice inequality for h and f_y, the 2x2 matrix
/// inequality, its determinant form and the final bound on B. The top-level
/// report is B <= goal at the worst y-node.
InequalityReport verify_inductive_step(const SplitMeasure& sm, const TestFunction& h, double tol = kDefaultTolerance);

inline constexpr double kPsdMargin = -1e-8;

}  // namespace lcbl
