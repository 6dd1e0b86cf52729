#include "lcbl/report_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#include "lcbl/error.hpp"

namespace lcbl {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void row(const InequalityReport& r, std::string& out) {
  const std::string_view verdict = r.all_hold() ? to_string(r.verdict) : to_string(Verdict::violated);
  out += csv_field(r.name) + ',' + std::to_string(r.n) + ',' + (r.p ? fmt(*r.p) : "") + ',' + fmt(r.lhs) + ',' +
         fmt(r.rhs) + ',' + fmt(r.ratio) + ',' + std::string(verdict) + '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io_error, "cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error(ErrorKind::io_error, "write failed for '" + path.string() + "'");
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const RunOutput& out, const RunMeta& meta) {
  Json j;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.config_hash));
  j["meta"] = {{"version", kVersion}, {"config_hash", hash}};
  j["meta"]["seed"] = meta.seed ? Json(*meta.seed) : Json(nullptr);
  j["meta"]["command"] = meta.command;
  j["meta"]["timestamp"] = meta.timestamp;
  j["reports"] = Json::array();
  for (const auto& r : out.reports) j["reports"].push_back(to_json(r));
  j["scans"] = Json::array();
  for (const auto& s : out.scans) j["scans"].push_back(to_json(s));
  return j;
}

std::string summary_csv(const RunOutput& out) {
  std::string text = "name,n,p,lhs,rhs,ratio,verdict\n";
  for (const auto& r : out.reports) row(r, text);
  for (const auto& s : out.scans) {
    const int n = s.meta.contains("n") ? s.meta["n"].get<int>() : 1;
    text += csv_field(s.tag) + ',' + std::to_string(n) + ",,,," + fmt(s.best) + ",scan\n";
  }
  return text;
}

std::vector<std::string> write_report(const RunOutput& out, const RunMeta& meta, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::string> files;
  write_file(dir / "report.json", to_json(out, meta).dump(2) + "\n");
  files.push_back("report.json");
  write_file(dir / "summary.csv", summary_csv(out));
  files.push_back("summary.csv");
  std::set<std::string> seen;
  for (const auto& s : out.scans) {
    if (!seen.insert(s.tag).second) throw Error(ErrorKind::io_error, "duplicate scan tag '" + s.tag + "'");
    write_file(dir / (s.tag + ".csv"), to_csv(s));
    files.push_back(s.tag + ".csv");
  }
  return files;
}

int exit_code(const RunOutput& out) {
  for (const auto& r : out.reports) {
    if (!r.all_hold()) return 2;
  }
  return 0;
}

}  // namespace lcbl
