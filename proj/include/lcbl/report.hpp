#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lcbl {

using Json = nlohmann::ordered_json;

enum class Verdict { holds, holds_at_equality, violated };

std::string_view to_string(Verdict v) noexcept;

inline constexpr double kDefaultTolerance = 1e-3;
inline constexpr double kDegenerateScale = 1e-14;

/// One evaluated inequality lhs <= rhs.
struct InequalityReport {
  std::string name;
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::optional<double> p;
  std::optional<double> q;
  int n = 0;
  double tol = kDefaultTolerance;
  Verdict verdict = Verdict::holds;
  bool degenerate = false;
  /// Standard error of the ratio for Monte Carlo estimates.
  std::optional<double> sigma;
  Json meta = Json::object();
  std::vector<InequalityReport> sub_reports;

  /// True when this report and every sub-report hold.
  bool all_hold() const;
};

/// Fills ratio, verdict and the degenerate flag. Both sides below 1e-14 in
/// magnitude give ratio 1 at equality; rhs = 0 < lhs gives an infinite ratio.
void judge(InequalityReport& r);

InequalityReport make_report(std::string name, std::string label, int n, double lhs, double rhs,
                             double tol = kDefaultTolerance);

/// The pointwise family lhs[k] <= rhs[k] summarized by its worst member; the
/// verdict is violated when any member is. meta records the worst index and
/// the violation count.
InequalityReport worst_case(std::string name, std::string label, int n, const std::vector<double>& lhs,
                            const std::vector<double>& rhs, double tol = kDefaultTolerance);

Json to_json(const InequalityReport& r);
/// Non-finite doubles become the strings "inf", "-inf", "nan".
Json number(double v);

}  // namespace lcbl
