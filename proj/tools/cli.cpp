#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lcbl/cli.hpp"
#include "lcbl/error.hpp"

namespace lcbl {

namespace {

struct Flags {
  std::string config;
  std::string out = "./out";
  std::string p;
  std::size_t nodes = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string mc;
};

void apply(const Flags& f, RunConfig& cfg) {
  if (!f.p.empty()) cfg.p_values = parse_p_list(f.p);
  if (f.nodes > 0) {
    cfg.nodes = f.nodes;
    cfg.nodes_3d = f.nodes;
  }
  if (f.seed) cfg.seed = f.seed;
  if (f.tol) cfg.tol = *f.tol;
  if (f.mc == "on") cfg.monte_carlo = true;
  if (f.mc == "off") cfg.monte_carlo = false;
}

std::string fmt_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << p;
  return os.str();
}

std::string fmt_ratio(double r) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << r;
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance and divided-difference inequality checks for log-concave measures", "lcbl"};
  app.require_subcommand(1);
  Flags flags;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--p", flags.p, "comma-separated p list; inf allowed");
    sub->add_option("--nodes", flags.nodes, "nodes per axis for every smooth measure");
    sub->add_option("--seed", flags.seed, "Monte Carlo and random-suite seed");
    sub->add_option("--tol", flags.tol, "relative verdict tolerance");
    sub->add_option("--mc", flags.mc, "Monte Carlo divided differences")->check(CLI::IsMember({"on", "off"}));
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ERROR: " << e.what() << " (usage)\n";
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = load_config(flags.config);
    apply(flags, cfg);
    const RunOutput result = run_suites(command, cfg);
    RunMeta meta;
    meta.config_hash = cfg.hash;
    meta.seed = cfg.seed;
    meta.command = command;
    meta.timestamp = utc_timestamp();
    write_report(result, meta, flags.out);
    for (const auto& r : result.reports) {
      out << (r.all_hold() ? "PASS " : "FAIL ") << r.name << (r.p ? " p=" + fmt_p(*r.p) : "") << " ratio=" << fmt_ratio(r.ratio) << " "
          << to_string(r.verdict) << " [" << r.label << "]\n";
    }
    for (const auto& s : result.scans) out << "SCAN " << s.tag << " best=" << fmt_ratio(s.best) << "\n";
    const int code = exit_code(result);
    out << "reports: " << result.reports.size() << ", scans: " << result.scans.size() << ", written to " << flags.out
        << "\n";
    return code;
  } catch (const Error& e) {
    err << "ERROR: " << e.detail() << " (" << to_string(e.kind()) << ")\n";
  } catch (const std::exception& e) {
    err << "ERROR: " << e.what() << "\n";
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lcbl
