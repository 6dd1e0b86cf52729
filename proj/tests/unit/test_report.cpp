#include <cmath>
#include <limits>

#include "gen.hpp"
#include "lcbl/report.hpp"
#include "lcbl/report_io.hpp"

using namespace lcbl;

TEST_CASE("verdict rules") {
  CHECK(make_report("a", "", 1, 0.5, 1.0).verdict == Verdict::holds);
  CHECK(make_report("a", "", 1, 1.0005, 1.0).verdict == Verdict::holds_at_equality);
  CHECK(make_report("a", "", 1, 0.9995, 1.0).verdict == Verdict::holds_at_equality);
  CHECK(make_report("a", "", 1, 1.002, 1.0).verdict == Verdict::violated);
  const InequalityReport d = make_report("a", "", 1, 1e-16, 0.0);
  CHECK(d.degenerate);
  CHECK(d.ratio == 1.0);
  CHECK(d.verdict == Verdict::holds_at_equality);
  const InequalityReport inf = make_report("a", "", 1, 0.1, 0.0);
  CHECK(std::isinf(inf.ratio));
  CHECK(inf.verdict == Verdict::violated);
}

TEST_CASE("sub-report violations propagate through all_hold") {
  InequalityReport r = make_report("parent", "", 1, 0.5, 1.0);
  r.sub_reports.push_back(make_report("child", "", 1, 2.0, 1.0));
  CHECK(r.verdict == Verdict::holds);
  CHECK_FALSE(r.all_hold());
  RunOutput out;
  out.reports.push_back(r);
  CHECK(exit_code(out) == 2);
  CHECK(summary_csv(out).find("parent,1,,0.5,1,0.5,violated") != std::string::npos);
}

TEST_CASE("worst case picks the largest ratio") {
  const InequalityReport r = worst_case("w", "", 1, {0.1, 0.9, 0.3}, {1.0, 1.0, 1.0});
  CHECK(r.ratio == doctest::Approx(0.9));
  CHECK(r.meta["worst_index"].get<int>() == 1);
  CHECK(worst_case("w", "", 1, {0.1, 2.0}, {1.0, 1.0}).verdict == Verdict::violated);
}

TEST_CASE("non-finite numbers serialize as strings") {
  CHECK(number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(number(std::nan("")) == "nan");
  CHECK(number(1.5) == 1.5);
  const Json j = to_json(make_report("a", "", 1, 0.1, 0.0));
  CHECK(j["ratio"] == "inf");
}

TEST_CASE("one report gives a two-line summary") {
  RunOutput out;
  InequalityReport r = make_report("BL-var", "x", 1, 0.5, 1.0);
  r.p = 2.0;
  out.reports.push_back(r);
  const std::string csv = summary_csv(out);
  CHECK(csv == "name,n,p,lhs,rhs,ratio,verdict\nBL-var,1,2,0.5,1,0.5,holds\n");
}

TEST_CASE("report json carries the meta block") {
  RunOutput out;
  RunMeta meta;
  meta.config_hash = 0xabcdef;
  meta.seed = 3;
  meta.command = "all";
  meta.timestamp = "2000-01-01T00:00:00Z";
  const Json j = to_json(out, meta);
  CHECK(j["meta"]["version"] == kVersion);
  CHECK(j["meta"]["config_hash"] == "0000000000abcdef");
  CHECK(j["meta"]["seed"] == 3);
  CHECK(j["reports"].is_array());
  CHECK(j["scans"].is_array());
}
