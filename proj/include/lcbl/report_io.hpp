#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcbl/constants.hpp"
#include "lcbl/report.hpp"

namespace lcbl {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutput {
  std::vector<InequalityReport> reports;
  std::vector<ScanResult> scans;
};

struct RunMeta {
  std::uint64_t config_hash = 0;
  std::optional<std::uint64_t> seed;
  std::string command;
  std::string timestamp;
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

Json to_json(const RunOutput& out, const RunMeta& meta);
/// Header name,n,p,lhs,rhs,ratio,verdict; one row per top-level report (its
/// verdict reads "violated" when any sub-report is) and one per scan, with
/// verdict "scan". Sub-reports are only in report.json.
std::string summary_csv(const RunOutput& out);

/// Writes report.json, summary.csv and one <tag>.csv per scan; returns the
/// file names written. Throws io-error.
std::vector<std::string> write_report(const RunOutput& out, const RunMeta& meta, const std::filesystem::path& dir);

/// 0 when every report holds, 2 when any is violated.
int exit_code(const RunOutput& out);

}  // namespace lcbl
