#include <algorithm>
#include <cmath>

#include "lcbl/cli.hpp"
#include "lcbl/conditional.hpp"
#include "lcbl/constants.hpp"
#include "lcbl/error.hpp"
#include "lcbl/inequalities.hpp"
#include "lcbl/lemmas.hpp"

namespace lcbl {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config_error, msg); }

const Json& section(const RunConfig& cfg, const char* key) {
  static const Json empty;
  return cfg.suites.contains(key) ? cfg.suites[key] : empty;
}

const Json& list(const Json& j, const char* what) {
  static const Json none = Json::array();
  if (j.is_null()) return none;
  if (!j.is_array()) fail(std::string("suite '") + what + "' must be an array");
  return j;
}

std::string id_of(const Json& c) {
  if (!c.contains("measure") || !c["measure"].is_string()) fail("suite case needs a measure id");
  return c["measure"].get<std::string>();
}

const Json& field(const Json& c, const char* key) {
  if (!c.contains(key)) fail(std::string("suite case needs '") + key + "'");
  return c[key];
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions o;
  o.tol = cfg.tol;
  o.poisson = cfg.poisson;
  o.poisson_node_limit = cfg.poisson_node_limit;
  o.monte_carlo = cfg.monte_carlo;
  o.mc.samples = cfg.mc_samples;
  o.mc.seed = cfg.seed;
  return o;
}

void tag_with(InequalityReport& r, const std::string& id) { r.meta["measure_id"] = id; }

SetSpec parse_set(const Json& j, int n) {
  const std::string kind = j.value("kind", "");
  if (kind == "half_line") {
    const double t = j.value("t", 0.0);
    return j.value("lower", false) ? SetSpec::lower_half_line(t) : SetSpec::upper_half_line(t);
  }
  if (kind == "interval") return SetSpec::interval(j.value("a", -1.0), j.value("b", 1.0));
  if (kind == "halfspace") {
    if (!j.contains("direction") || !j["direction"].is_array()) fail("halfspace needs 'direction'");
    Vec d(static_cast<Eigen::Index>(j["direction"].size()));
    for (std::size_t i = 0; i < j["direction"].size(); ++i) d[static_cast<Eigen::Index>(i)] = j["direction"][i].get<double>();
    if (d.size() != n) fail("halfspace direction has the wrong dimension");
    return SetSpec::halfspace(d, j.value("offset", 0.0));
  }
  fail("unknown set kind '" + kind + "'");
}

Vec parse_vec(const Json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

void run_bl(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  for (const Json& c : list(section(cfg, "verify_bl"), "verify_bl")) {
    const std::string id = id_of(c);
    const auto q = reg.quadrature(id);
    InequalityReport r = verify_bl_variance(q, parse_function(field(c, "h"), q->dimension()), verify_options(cfg));
    tag_with(r, id);
    out.reports.push_back(std::move(r));
  }
}

void run_asym(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  const VerifyOptions opts = verify_options(cfg);
  for (const Json& c : list(section(cfg, "verify_asym"), "verify_asym")) {
    const std::string id = id_of(c);
    const auto q = reg.quadrature(id);
    const int n = q->dimension();
    const TestFunction g = parse_function(field(c, "g"), n);
    const TestFunction h = parse_function(field(c, "h"), n);
    for (double p : cfg.p_values) {
      InequalityReport r = verify_asym(q, g, h, p, opts);
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
    if (c.value("bl3", false)) {
      if (n != 1) fail("the bl3 comparison is one-dimensional");
      const double formula = bl3_rhs(*q, g, h);
      InequalityReport inf = verify_asym(q, g, h, std::numeric_limits<double>::infinity(), opts);
      InequalityReport r = make_report("BL3", inf.label, 1, std::abs(inf.rhs - formula), 1e-6 * std::abs(formula), 0.0);
      r.meta["bl4_rhs_at_inf"] = number(inf.rhs);
      r.meta["formula"] = number(formula);
      r.meta["check"] = "|BL4 rhs at p = inf - formula| <= 1e-6 |formula|";
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
  for (const Json& c : list(section(cfg, "cov6"), "cov6")) {
    const std::string id = id_of(c);
    const auto q = reg.quadrature(id);
    InequalityReport r = verify_cov6(q, parse_function(field(c, "g"), q->dimension()),
                                     parse_function(field(c, "h"), q->dimension()), opts);
    tag_with(r, id);
    out.reports.push_back(std::move(r));
  }
}

void run_divdiff(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  const Json& sec = section(cfg, "divdiff");
  if (sec.is_null()) return;
  const VerifyOptions opts = verify_options(cfg);
  const std::size_t cells = sec.value("cells", std::size_t{1024});
  if (sec.contains("field")) {
    for (const Json& c : list(sec["field"], "divdiff.field")) {
      const std::string id = id_of(c);
      const int n = reg.dimension(id);
      const TestFunction h = parse_function(field(c, "h"), n);
      VerifyOptions o = opts;
      if (c.contains("monte_carlo")) o.monte_carlo = c["monte_carlo"].get<bool>();
      if (o.monte_carlo && !cfg.seed) fail("seed required");
      InequalityReport r;
      if (n >= 4) {
        const PotentialPtr p = reg.potential(id);
        if (!p || !p->gaussian_precision()) fail("measures with n >= 4 need an exact sampler (gaussian or quadratic)");
        auto m = std::make_shared<const Measure>(Measure::smooth(p, 0.0, Box::cube(n, 12.0), 0.0));
        r = verify_divided_difference(m, nullptr, h, o);
      } else {
        const auto q = reg.quadrature(id);
        r = verify_divided_difference(q->measure, q, h, o);
      }
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
  if (sec.contains("sets")) {
    for (const Json& c : list(sec["sets"], "divdiff.sets")) {
      const Json& mspec = field(c, "measure");
      MeasurePtr m;
      QuadraturePtr q;
      std::string id = "inline";
      if (mspec.is_string()) {
        id = mspec.get<std::string>();
        m = reg.measure(id);
        if (m->dimension() > 1) q = reg.quadrature(id);
      } else {
        m = reg.inline_measure(mspec);
      }
      InequalityReport r = verify_divided_difference_set(m, parse_set(field(c, "set"), m->dimension()), q,
                                                         c.value("cells", cells), opts);
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
  if (sec.contains("layer_cake")) {
    for (const Json& c : list(sec["layer_cake"], "divdiff.layer_cake")) {
      const std::string id = id_of(c);
      const auto q = reg.quadrature(id);
      InequalityReport r = verify_layer_cake(q, parse_function(field(c, "h"), q->dimension()),
                                             c.value("levels", std::size_t{64}), opts);
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
}

void add_scan(RunOutput& out, ScanResult s, const std::string& tag, int n) {
  s.tag = tag;
  s.meta["n"] = n;
  out.scans.push_back(std::move(s));
}

void run_scans(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  const Json& sec = section(cfg, "scans");
  if (sec.is_null()) return;
  ScanOptions so;
  so.cells = sec.value("cells", so.cells);
  so.thresholds = sec.value("thresholds", so.thresholds);
  if (sec.contains("char_1d")) {
    for (const Json& c : list(sec["char_1d"], "scans.char_1d")) {
      const std::string id = id_of(c);
      const std::string mode = c.value("mode", "half_lines");
      if (mode != "half_lines" && mode != "intervals") fail("scan mode must be half_lines or intervals");
      const MeasurePtr m = reg.measure(id);
      ScanResult s = scan_sharp_constant_1d(*m, mode == "half_lines" ? ScanMode::half_lines : ScanMode::intervals, so);
      InequalityReport r = make_report("char-1d", id + " " + mode, 1, s.best, 2.0, cfg.tol);
      r.meta["argmax"] = s.argmax;
      r.meta["flags"] = s.flags;
      tag_with(r, id);
      out.reports.push_back(std::move(r));
      add_scan(out, std::move(s), "char-1d-" + id + "-" + mode, 1);
    }
  }
  CheegerOptions co;
  co.cells = so.cells;
  if (sec.contains("cheeger")) {
    for (const Json& c : list(sec["cheeger"], "scans.cheeger")) {
      const std::string id = c.get<std::string>();
      const MeasurePtr m = reg.measure(id);
      ScanResult s = cheeger_estimate(*m, co);
      const int n = m->dimension();
      if (sec.value("ledoux", false)) {
        const auto q = reg.quadrature(id);
        ScanResult l = ledoux_bound(*q, s.best);
        const double cap = std::ldexp(1.0, n);
        InequalityReport r = make_report("ledoux", id, n, l.best, cap, 1e-6 / cap);
        r.meta["alpha"] = number(s.best);
        r.meta["argmin_R"] = number(l.argmax.empty() ? 0.0 : l.argmax[0]);
        tag_with(r, id);
        out.reports.push_back(std::move(r));
        add_scan(out, std::move(l), "ledoux-" + id, n);
      }
      add_scan(out, std::move(s), "cheeger-" + id, n);
    }
  }
  if (sec.contains("halfspace")) {
    for (const Json& c : list(sec["halfspace"], "scans.halfspace")) {
      const std::string id = id_of(c);
      const auto q = reg.quadrature(id);
      InequalityReport r = halfspace_reduction_check(q, parse_vec(field(c, "direction"), "direction"),
                                                     c.value("offset", 0.0), verify_options(cfg));
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
  if (sec.contains("gap_demo")) {
    const Json& c = sec["gap_demo"];
    std::vector<std::size_t> counts{8, 16, 32, 64};
    if (c.is_object() && c.contains("cells")) counts = c["cells"].get<std::vector<std::size_t>>();
    const FailureDemo d = gap_demo(counts, verify_options(cfg));
    ScanResult s;
    s.parameter_names = {"cells"};
    double worst = 0.0;
    for (std::size_t k = 0; k < d.reports.size(); ++k) {
      worst = std::max(worst, d.reports[k].ratio);
      if (!std::isfinite(d.reports[k].ratio)) continue;
      s.parameters.push_back({d.parameters[k]});
      s.ratios.push_back(d.reports[k].ratio);
    }
    if (d.divergent) s.flags.push_back("divergent");
    s.best = worst;
    s.meta["demo"] = to_json(d);
    InequalityReport r = make_report("gap-divergence", "ratio under refinement exceeds 1e3", 1, 1e3, worst, cfg.tol);
    r.meta["divergent"] = d.divergent;
    if (!d.divergent) r.verdict = Verdict::violated;
    out.reports.push_back(std::move(r));
    add_scan(out, std::move(s), "gap-demo", 1);
  }
  if (sec.contains("spike_demo")) {
    const Json& c = sec["spike_demo"];
    std::vector<double> eps{1e-1, 1e-2, 1e-3};
    if (c.is_object() && c.contains("eps")) eps = c["eps"].get<std::vector<double>>();
    const FailureDemo d = spike_demo(eps, so.cells, verify_options(cfg));
    ScanResult s;
    s.parameter_names = {"eps"};
    for (std::size_t k = 0; k < d.reports.size(); ++k) {
      s.parameters.push_back({d.parameters[k]});
      s.ratios.push_back(d.reports[k].ratio);
    }
    s.best = *std::max_element(s.ratios.begin(), s.ratios.end());
    s.meta["demo"] = to_json(d);
    InequalityReport r = make_report("spike-log-fit", "R^2 of ratio ~ a + b ln(1/eps)", 1, 0.99, d.fit.r2, 0.0);
    r.meta["a"] = number(d.fit.a);
    r.meta["b"] = number(d.fit.b);
    if (!(d.fit.b > 0.0)) r.verdict = Verdict::violated;
    out.reports.push_back(std::move(r));
    add_scan(out, std::move(s), "spike-demo", 1);
  }
}

void run_fisher(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  FisherOptions fo;
  fo.tol = cfg.tol;
  for (const Json& c : list(section(cfg, "cond_fisher"), "cond_fisher")) {
    const std::string id = id_of(c);
    const auto q = reg.quadrature(id);
    const SplitMeasure sm = split_measure(q, c.value("m", 1));
    InequalityReport r = verify_conditional_fisher(sm, parse_function(field(c, "h"), q->dimension()), fo);
    tag_with(r, id);
    out.reports.push_back(std::move(r));
  }
}

void run_bl35(const RunConfig& cfg, RunOutput& out) {
  const Json& sec = section(cfg, "bl35");
  if (sec.is_null()) return;
  std::vector<double> ms{10.0, 100.0, 1000.0};
  if (sec.contains("M")) ms = sec["M"].get<std::vector<double>>();
  if (ms.size() < 2) fail("bl35 needs at least two M values");
  ScanResult s = bl35_impossibility_scan(ms);
  const double decades = std::log10(ms.back() / ms.front());
  InequalityReport r = make_report("bl35-growth", "ratio grows by >= 5 per decade of M", 1,
                                   std::pow(5.0, decades) * s.ratios.front(), s.ratios.back(), cfg.tol);
  r.meta["flags"] = s.flags;
  if (!s.flags.empty()) r.verdict = Verdict::violated;
  out.reports.push_back(std::move(r));
  add_scan(out, std::move(s), "bl35", 1);
}

void run_lemmas(const RunConfig& cfg, MeasureRegistry& reg, RunOutput& out) {
  const Json& sec = section(cfg, "lemmas");
  if (sec.is_null()) return;
  const std::size_t mp = sec.value("matrix_power_cases", std::size_t{10000});
  const std::size_t qc = sec.value("quotient_cases", std::size_t{10000});
  if ((mp > 0 || qc > 0) && !cfg.seed) fail("seed required");
  for (const SuiteResult& s : {matrix_power_suite(mp, *cfg.seed), quotient_convexity_suite(qc, *cfg.seed)}) {
    InequalityReport r = make_report(s.name + "-suite", std::to_string(s.cases) + " random cases", 0,
                                     1.0 - s.worst_margin, 1.0, 1e-12);
    r.meta = to_json(s);
    if (s.failures > 0) r.verdict = Verdict::violated;
    out.reports.push_back(std::move(r));
  }
  if (sec.contains("inductive")) {
    for (const Json& c : list(sec["inductive"], "lemmas.inductive")) {
      const std::string id = id_of(c);
      const auto q = reg.quadrature(id);
      InequalityReport r =
          verify_inductive_step(split_measure(q, 1), parse_function(field(c, "h"), q->dimension()), cfg.tol);
      tag_with(r, id);
      out.reports.push_back(std::move(r));
    }
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"verify-bl",   "verify-asym", "verify-divdiff", "scan-constants",
                                              "cond-fisher", "bl35",        "lemmas",         "all"};
  return names;
}

RunOutput run_suites(const std::string& command, const RunConfig& cfg) {
  if (std::find(subcommands().begin(), subcommands().end(), command) == subcommands().end()) {
    fail("unknown subcommand '" + command + "'");
  }
  validate(cfg);
  MeasureRegistry reg(cfg);
  RunOutput out;
  const bool all = command == "all";
  if (all || command == "verify-bl") run_bl(cfg, reg, out);
  if (all || command == "verify-asym") run_asym(cfg, reg, out);
  if (all || command == "verify-divdiff") run_divdiff(cfg, reg, out);
  if (all || command == "scan-constants") run_scans(cfg, reg, out);
  if (all || command == "cond-fisher") run_fisher(cfg, reg, out);
  if (all || command == "bl35") run_bl35(cfg, out);
  if (all || command == "lemmas") run_lemmas(cfg, reg, out);
  return out;
}

}  // namespace lcbl
