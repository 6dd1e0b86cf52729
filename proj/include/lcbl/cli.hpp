#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lcbl/config.hpp"
#include "lcbl/report_io.hpp"

namespace lcbl {

/// Subcommands: verify-bl, verify-asym, verify-divdiff, scan-constants,
/// cond-fisher, bl35, lemmas, all.
const std::vector<std::string>& subcommands();

/// Runs the config sections that belong to `command`.
RunOutput run_suites(const std::string& command, const RunConfig& cfg);

/// Exit codes: 0 all reports hold, 2 some report is violated, 1 on any error
/// (printed to `err` as a single "ERROR: ..." line).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace lcbl
