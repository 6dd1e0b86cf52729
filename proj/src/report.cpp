#include "lcbl/report.hpp"

#include <cmath>

#include "lcbl/error.hpp"

namespace lcbl {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_at_equality: return "holds-at-equality";
    case Verdict::violated: return "violated";
  }
  return "unknown";
}

bool InequalityReport::all_hold() const {
  if (verdict == Verdict::violated) return false;
  for (const auto& s : sub_reports) {
    if (!s.all_hold()) return false;
  }
  return true;
}

void judge(InequalityReport& r) {
  r.degenerate = false;
  if (std::abs(r.lhs) <= kDegenerateScale && std::abs(r.rhs) <= kDegenerateScale) {
    r.ratio = 1.0;
    r.degenerate = true;
    r.verdict = Verdict::holds_at_equality;
    return;
  }
  if (r.rhs == 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.lhs / r.rhs;
  }
  const double tol = r.sigma ? 3.0 * *r.sigma : r.tol;
  if (!(r.ratio <= 1.0 + tol)) {
    r.verdict = Verdict::violated;
  } else if (std::abs(r.ratio - 1.0) <= tol) {
    r.verdict = Verdict::holds_at_equality;
  } else {
    r.verdict = Verdict::holds;
  }
}

InequalityReport make_report(std::string name, std::string label, int n, double lhs, double rhs, double tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.label = std::move(label);
  r.n = n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tol = tol;
  judge(r);
  return r;
}

InequalityReport worst_case(std::string name, std::string label, int n, const std::vector<double>& lhs,
                            const std::vector<double>& rhs, double tol) {
  if (lhs.empty() || lhs.size() != rhs.size()) throw Error(ErrorKind::invalid_input, "worst_case needs matching sides");
  std::size_t worst = 0;
  double worst_ratio = -1.0;
  std::size_t violations = 0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    const InequalityReport r = make_report("", "", n, lhs[k], rhs[k], tol);
    if (r.verdict == Verdict::violated) ++violations;
    const double ratio = r.degenerate ? 0.0 : r.ratio;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = k;
    }
  }
  InequalityReport r = make_report(std::move(name), std::move(label), n, lhs[worst], rhs[worst], tol);
  r.meta["points"] = lhs.size();
  r.meta["worst_index"] = worst;
  r.meta["violations"] = violations;
  if (violations > 0) r.verdict = Verdict::violated;
  return r;
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const InequalityReport& r) {
  Json j;
  j["name"] = r.name;
  j["label"] = r.label;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["ratio"] = number(r.ratio);
  j["params"] = {{"p", r.p ? number(*r.p) : Json(nullptr)}, {"q", r.q ? number(*r.q) : Json(nullptr)}, {"n", r.n}};
  j["verdict"] = std::string(to_string(r.verdict));
  j["tol"] = number(r.tol);
  j["degenerate"] = r.degenerate;
  if (r.sigma) j["sigma"] = number(*r.sigma);
  j["meta"] = r.meta;
  Json subs = Json::array();
  for (const auto& s : r.sub_reports) subs.push_back(to_json(s));
  j["sub_reports"] = subs;
  return j;
}

}  // namespace lcbl
