#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lcbl/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result lcbl_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lcbl::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(LCBL_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lcbl_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("lcbl_cli_" + name + ".json");
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("verify-asym at p = inf on the 1-d gaussian") {
  const fs::path out = scratch("asym");
  const Result r = lcbl_run({"verify-asym", "--config", config("gaussian1d.json"), "--p", "inf", "--out", out.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(read(out / "report.json"));
  REQUIRE(j["reports"].size() == 1);
  CHECK(j["reports"][0]["ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(j["reports"][0]["params"]["p"] == "inf");
}

TEST_CASE("a single BL report gives a two-line summary") {
  const fs::path out = scratch("bl");
  CHECK(lcbl_run({"verify-bl", "--config", config("gaussian1d.json"), "--out", out.string()}).code == 0);
  const std::string csv = read(out / "summary.csv");
  CHECK(lines(csv) == 2);
  CHECK(csv.rfind("name,n,p,lhs,rhs,ratio,verdict\n", 0) == 0);
}

TEST_CASE("scan-constants on the uniform measure") {
  const fs::path out = scratch("scan");
  CHECK(lcbl_run({"scan-constants", "--config", config("uniform.json"), "--out", out.string()}).code == 0);
  const std::string csv = read(out / "summary.csv");
  CHECK(csv.find("char-1d-unif-half_lines,1,,,,1.38629436112,scan") != std::string::npos);
  const std::string plot = read(out / "char-1d-unif-half_lines.csv");
  CHECK(plot.rfind("parameter,ratio\n", 0) == 0);
}

TEST_CASE("missing seed with monte carlo enabled") {
  const Result r = lcbl_run({"all", "--config", config("broken.json"), "--out", scratch("broken").string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("ERROR: seed required", 0) == 0);
  CHECK(lines(r.err) == 1);
}

TEST_CASE("a violated report exits 2") {
  const Result r = lcbl_run({"all", "--config", config("violated.json"), "--out", scratch("violated").string()});
  CHECK(r.code == 2);
  CHECK(r.out.find("violated") != std::string::npos);
}

TEST_CASE("usage and io errors exit 1 with one ERROR line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"frobnicate", "--config", config("gaussian1d.json")},
           {"all"},
           {"all", "--config", "/nonexistent.json"},
           {"all", "--config", config("gaussian1d.json"), "--mc", "maybe"},
           {"all", "--config", config("gaussian1d.json"), "--p", "1"},
           {"all", "--config", config("gaussian1d.json"), "--nodes", "4"},
       }) {
    const Result r = lcbl_run(args);
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR:", 0) == 0);
    CHECK(lines(r.err) == 1);
  }
}

TEST_CASE("flag overrides reach the run") {
  const fs::path out = scratch("flags");
  const Result r = lcbl_run({"verify-asym", "--config", config("gaussian1d.json"), "--p", "2,4", "--nodes", "65",
                             "--tol", "1e-2", "--seed", "9", "--out", out.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(read(out / "report.json"));
  CHECK(j["meta"]["seed"] == 9);
  REQUIRE(j["reports"].size() == 2);
  CHECK(j["reports"][0]["tol"] == 1e-2);
  CHECK(j["reports"][1]["params"]["p"] == 4.0);
}

TEST_CASE("mc flag forces a seed") {
  const fs::path cfg = write_config("mc", R"({"measures": [{"id": "g", "kind": "gaussian", "n": 1}],
    "suites": {"divdiff": {"field": [{"measure": "g", "h": {"kind": "coordinate"}}]}}})");
  CHECK(lcbl_run({"verify-divdiff", "--config", cfg.string(), "--mc", "on", "--out", scratch("mc1").string()}).code ==
        1);
  const Result ok = lcbl_run({"verify-divdiff", "--config", cfg.string(), "--mc", "on", "--seed", "5", "--out",
                              scratch("mc2").string()});
  CHECK(ok.code == 0);
}

TEST_CASE("empty suites give valid empty arrays") {
  const fs::path cfg = write_config("empty", "{}");
  const fs::path out = scratch("empty");
  CHECK(lcbl_run({"all", "--config", cfg.string(), "--out", out.string()}).code == 0);
  const auto j = nlohmann::json::parse(read(out / "report.json"));
  CHECK(j["reports"].empty());
  CHECK(j["scans"].empty());
  CHECK(lines(read(out / "summary.csv")) == 1);
}

TEST_CASE("reruns are identical apart from the timestamp") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  CHECK(lcbl_run({"all", "--config", config("uniform.json"), "--out", a.string()}).code == 0);
  CHECK(lcbl_run({"all", "--config", config("uniform.json"), "--out", b.string()}).code == 0);
  auto ja = nlohmann::ordered_json::parse(read(a / "report.json"));
  auto jb = nlohmann::ordered_json::parse(read(b / "report.json"));
  ja["meta"].erase("timestamp");
  jb["meta"].erase("timestamp");
  CHECK(ja.dump() == jb.dump());
  CHECK(read(a / "summary.csv") == read(b / "summary.csv"));
}

TEST_CASE("unknown measure ids and set kinds are configuration errors") {
  const fs::path cfg = write_config("badid", R"({"suites": {"verify_bl": [{"measure": "nope", "h": {"kind": "coordinate"}}]}})");
  const Result r = lcbl_run({"verify-bl", "--config", cfg.string(), "--out", scratch("badid").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("nope") != std::string::npos);
}
